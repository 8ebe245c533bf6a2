#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <vector>

#include "fringe/error.hpp"

namespace fringe::fock {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

// Basis conventions used throughout:
//  * Each mode is truncated at n_max photons, so a mode has n_max+1 levels.
//  * A basis ket over m modes is |n_0 n_1 ... n_{m-1}> and its flat index is
//    sum_k n_k * (n_max+1)^(m-1-k), i.e. mode 0 is the most significant digit.
//  * tensor(a, b) places the modes of `a` before the modes of `b`.
//
// For the four-mode coincidence geometry the modes are ordered as the four
// detectors (1,2,3,4): detectors 1,2 are the two output ports at node A and
// detectors 3,4 the two at node B. Interleave a read-out pair with a signal
// pair via permute_modes before mixing, so node A mixes modes (0,1) and node
// B mixes modes (2,3).

// Default photon-number cutoff: at the operating excitation probabilities
// (p1 below ~0.06 per arm) the mass above four photons is below 1e-5, and
// the cutoff stays a parameter so convergence can be tested by raising it.
inline constexpr int kDefaultCutoff = 4;

// Truncated Fock-space density matrix over 1, 2 or 4 optical modes.
class FockState {
  public:
    // Vacuum state |0...0><0...0|.
    FockState(int n_max, int mode_count);

    static FockState from_matrix(int n_max, int mode_count, Matrix rho);

    int n_max() const { return n_max_; }
    int mode_count() const { return mode_count_; }
    int level_count() const { return n_max_ + 1; }
    int dim() const { return static_cast<int>(rho_.rows()); }

    const Matrix& matrix() const { return rho_; }
    Matrix& matrix() { return rho_; }

    double trace_real() const { return rho_.trace().real(); }

    // Checks the density-matrix invariants: Hermitian to 1e-12, unit trace to
    // 1e-10, smallest eigenvalue >= -1e-10. Throws on violation.
    void validate() const;

    double hermiticity_defect() const;
    double min_eigenvalue() const;

    Complex element(const std::vector<int>& bra,
                    const std::vector<int>& ket) const;
    void set_element(const std::vector<int>& bra, const std::vector<int>& ket,
                     Complex value);

  private:
    int n_max_;
    int mode_count_;
    Matrix rho_;
};

int basis_index(const std::vector<int>& occupations, int n_max);
std::vector<int> basis_occupations(int index, int n_max, int mode_count);

// Per-mode click/no-click outcome flags, indexed by detector 1..4.
struct DetectionPattern {
    std::array<bool, 4> click{false, false, false, false};

    // Builds the pattern from detector labels, e.g. {1,3} for N13.
    static DetectionPattern from_detectors(std::initializer_list<int> detectors);
    static DetectionPattern from_index(int bits);  // bit k -> detector k+1

    // Valid coincidence events have exactly one click per node: one of
    // detectors 1,2 and one of detectors 3,4.
    bool one_click_per_node() const {
        return (click[0] != click[1]) && (click[2] != click[3]);
    }
};

// rho_a (x) rho_b. Requires equal cutoffs; trace is multiplicative.
FockState tensor(const FockState& a, const FockState& b);

// Reorders modes; new_from_old[k] is the old position of new mode k.
FockState permute_modes(const FockState& state,
                        const std::vector<int>& new_from_old);

// Annihilation operator of one mode on the full space.
Matrix annihilation(int n_max, int mode_count, int mode);

// Fock-space unitary of a balanced two-mode mixer. The single-photon
// transfer matrix is
//     B = 1/sqrt(2) * [ 1   e^{i phase} ;
//                       1  -e^{i phase} ]
// acting on (mode_a, mode_b); input mode j feeds the outputs with column j
// of B. Photons above the cutoff in the pair's joint sector are reflected
// back by the truncation, so keep populated sectors within n_max per pair.
Matrix mixing_unitary(int n_max, int mode_count, int mode_a, int mode_b,
                      double phase);

// Conjugates the state by the mixing unitary; models the half-wave-plate +
// polarizing-splitter detection stage, which acts as a balanced splitter.
FockState mix_at_node(const FockState& state, int mode_a, int mode_b,
                      double phase);

// Diagonal projector selecting basis states whose per-mode occupation
// matches the click pattern (click <=> at least one photon).
Matrix detection_projector(const DetectionPattern& pattern, int n_max);

struct CoincidenceProbs {
    double n13 = 0.0;
    double n14 = 0.0;
    double n23 = 0.0;
    double n24 = 0.0;

    double total() const { return n13 + n14 + n23 + n24; }
};

// Closed-form coincidence probabilities of the one-click-per-node patterns
// for a pair of two-mode states that are diagonal apart from a single
// coherence between |01> and |10> (the structure of the source states).
//
// Node A interferes mode 0 of rho_e with mode 0 of rho_s on a balanced
// mixer feeding detectors 1,2; node B does the same with modes 1 and
// detectors 3,4. The result is evaluated combinatorially, photon sector by
// photon sector, and is exact for this state class; the brute-force
// tensor -> mix -> project pipeline reproduces it whenever the populated
// sectors keep the mixers below the cutoff.
CoincidenceProbs coincidence_probs(const FockState& rho_e,
                                   const FockState& rho_s);

// (N13 + N24 - N14 - N23) / (N13 + N24 + N14 + N23).
double visibility_from_counts(double n13, double n14, double n23, double n24);
double visibility_from_counts(const CoincidenceProbs& n);

// Concurrence of an X-structured two-mode state at n_max = 1:
// C = 2 * max(0, |d| - sqrt(p00 * p11)).
double concurrence_x_state(const FockState& rho);

}  // namespace fringe::fock
