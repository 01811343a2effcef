#pragma once

#include <array>
#include <vector>

#include "ghzqec/qstate.hpp"

namespace ghzqec {

// Pairwise amplitude visibilities between photons entering ports j and j'.
struct VisibilityMatrix {
  Matrix mu;
  static VisibilityMatrix uniform(int ports, cplx mu);
  int ports() const { return static_cast<int>(mu.rows()); }
  void validate() const;  // unit diagonal, Hermitian, |mu| <= 1
};

enum class Routing { stage2, bell_pairs };

struct DetectorConfig {
  bool pnr = true;
  Routing routing = Routing::stage2;
};

// Photon counts per output detector. The matrix acts on the binary-occupancy
// input space of the network, input port 0 most significant.
struct PovmElement {
  Matrix matrix;
  std::vector<int> pattern;
};

Matrix beamsplitter_4x4();
Matrix bell_beamsplitter();    // 2x2 balanced splitter
Matrix bell_pairs_network();   // ports (0,1) and (2,3) each on a balanced splitter

double intensity_to_amplitude_visibility(double mu_I);

// Generic photon-counting element for any linear network (rows = input ports,
// columns = detectors). Cached on (network, pattern, visibilities).
PovmElement pattern_povm(const Matrix& network, const std::vector<int>& counts,
                         const VisibilityMatrix& mu);

PovmElement w_povm(int k, int n, const VisibilityMatrix& mu);
PovmElement ghz_povm(int det_a, int det_b, int n_a, int n_b, const VisibilityMatrix& mu);
// Same-detector double count on the stage-2 network.
PovmElement bunching_povm(int k, const VisibilityMatrix& mu);

// Order: E00, E10, E01, E11, E20, E02 on the two-port space.
struct BellPovmSet {
  std::array<PovmElement, 6> elements;
  const PovmElement& e00() const { return elements[0]; }
  const PovmElement& e10() const { return elements[1]; }
  const PovmElement& e01() const { return elements[2]; }
  const PovmElement& e11() const { return elements[3]; }
  const PovmElement& e20() const { return elements[4]; }
  const PovmElement& e02() const { return elements[5]; }
};
BellPovmSet bell_povm_set(cplx mu);

// Count-resolved element families for one detector shape; first entry is the
// minimal-count pattern.
std::vector<PovmElement> w_count_family(int k, const VisibilityMatrix& mu);
std::vector<PovmElement> ghz_count_family(int det_a, int det_b, const VisibilityMatrix& mu);

PovmElement click_povm(const std::vector<PovmElement>& family, bool pnr);

// Number of cached elements (for tests/benchmarks).
size_t povm_cache_size();

}  // namespace ghzqec
