#include "fringe/fock.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace fringe::fock {

namespace {

constexpr double kHermTol = 1e-12;
constexpr double kTraceTol = 1e-10;
constexpr double kPsdFloor = -1e-10;
constexpr double kStructureTol = 1e-9;

int ipow(int base, int exp) {
    int r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// Probability that a Fock input |m,n> on a balanced mixer sends every photon
// into one chosen output port: (m+n)! / (m! n! 2^(m+n)). Zero photons never
// produce a click.
double all_one_port(int m, int n) {
    const int total = m + n;
    if (total == 0) return 0.0;
    return factorial(total) /
           (factorial(m) * factorial(n) * std::pow(2.0, total));
}

void check_mode_count(int mode_count) {
    if (mode_count != 1 && mode_count != 2 && mode_count != 4)
        throw_error(ErrorKind::invalid_argument,
                    "mode count must be 1, 2 or 4");
}

}  // namespace

FockState::FockState(int n_max, int mode_count)
    : n_max_(n_max), mode_count_(mode_count) {
    if (n_max < 1)
        throw_error(ErrorKind::invalid_argument, "n_max must be >= 1");
    check_mode_count(mode_count);
    const int d = ipow(n_max + 1, mode_count);
    rho_ = Matrix::Zero(d, d);
    rho_(0, 0) = 1.0;
}

FockState FockState::from_matrix(int n_max, int mode_count, Matrix rho) {
    FockState s(n_max, mode_count);
    if (rho.rows() != s.dim() || rho.cols() != s.dim())
        throw_error(ErrorKind::invalid_argument,
                    "matrix dimension does not match cutoff and mode count");
    s.rho_ = std::move(rho);
    return s;
}

double FockState::hermiticity_defect() const {
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double FockState::min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_ + rho_.adjoint()),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

void FockState::validate() const {
    if (hermiticity_defect() > kHermTol)
        throw_error(ErrorKind::invalid_argument, "state is not Hermitian");
    if (std::abs(rho_.trace().real() - 1.0) > kTraceTol ||
        std::abs(rho_.trace().imag()) > kTraceTol)
        throw_error(ErrorKind::invalid_argument, "state trace is not 1");
    if (min_eigenvalue() < kPsdFloor)
        throw_error(ErrorKind::invalid_argument,
                    "state is not positive semidefinite");
}

Complex FockState::element(const std::vector<int>& bra,
                           const std::vector<int>& ket) const {
    return rho_(basis_index(bra, n_max_), basis_index(ket, n_max_));
}

void FockState::set_element(const std::vector<int>& bra,
                            const std::vector<int>& ket, Complex value) {
    rho_(basis_index(bra, n_max_), basis_index(ket, n_max_)) = value;
}

int basis_index(const std::vector<int>& occupations, int n_max) {
    int idx = 0;
    for (int n : occupations) {
        if (n < 0 || n > n_max)
            throw_error(ErrorKind::invalid_argument,
                        "occupation outside [0, n_max]");
        idx = idx * (n_max + 1) + n;
    }
    return idx;
}

std::vector<int> basis_occupations(int index, int n_max, int mode_count) {
    std::vector<int> occ(mode_count, 0);
    const int levels = n_max + 1;
    for (int k = mode_count - 1; k >= 0; --k) {
        occ[k] = index % levels;
        index /= levels;
    }
    return occ;
}

DetectionPattern DetectionPattern::from_detectors(
    std::initializer_list<int> detectors) {
    DetectionPattern p;
    for (int d : detectors) {
        if (d < 1 || d > 4)
            throw_error(ErrorKind::invalid_argument,
                        "detector label must be in 1..4");
        p.click[d - 1] = true;
    }
    return p;
}

DetectionPattern DetectionPattern::from_index(int bits) {
    if (bits < 0 || bits > 15)
        throw_error(ErrorKind::invalid_argument, "pattern index must be 0..15");
    DetectionPattern p;
    for (int k = 0; k < 4; ++k) p.click[k] = (bits >> k) & 1;
    return p;
}

FockState tensor(const FockState& a, const FockState& b) {
    if (a.n_max() != b.n_max())
        throw_error(ErrorKind::invalid_argument,
                    "tensor requires equal photon-number cutoffs");
    const int mc = a.mode_count() + b.mode_count();
    check_mode_count(mc);
    const int da = a.dim();
    const int db = b.dim();
    Matrix out(da * db, da * db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
    return FockState::from_matrix(a.n_max(), mc, std::move(out));
}

FockState permute_modes(const FockState& state,
                        const std::vector<int>& new_from_old) {
    const int m = state.mode_count();
    if (static_cast<int>(new_from_old.size()) != m)
        throw_error(ErrorKind::invalid_argument, "permutation size mismatch");
    std::vector<bool> seen(m, false);
    for (int v : new_from_old) {
        if (v < 0 || v >= m || seen[v])
            throw_error(ErrorKind::invalid_argument, "not a permutation");
        seen[v] = true;
    }
    const int d = state.dim();
    std::vector<int> map(d);
    for (int idx = 0; idx < d; ++idx) {
        const auto occ = basis_occupations(idx, state.n_max(), m);
        std::vector<int> occ_new(m);
        for (int k = 0; k < m; ++k) occ_new[k] = occ[new_from_old[k]];
        map[idx] = basis_index(occ_new, state.n_max());
    }
    Matrix out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out(map[i], map[j]) = state.matrix()(i, j);
    return FockState::from_matrix(state.n_max(), m, std::move(out));
}

Matrix annihilation(int n_max, int mode_count, int mode) {
    if (mode < 0 || mode >= mode_count)
        throw_error(ErrorKind::invalid_argument, "mode index out of range");
    const int d = ipow(n_max + 1, mode_count);
    Matrix a = Matrix::Zero(d, d);
    for (int idx = 0; idx < d; ++idx) {
        auto occ = basis_occupations(idx, n_max, mode_count);
        const int n = occ[mode];
        if (n == 0) continue;
        occ[mode] = n - 1;
        a(basis_index(occ, n_max), idx) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

Matrix mixing_unitary(int n_max, int mode_count, int mode_a, int mode_b,
                      double phase) {
    if (mode_a == mode_b || mode_a < 0 || mode_b < 0 ||
        mode_a >= mode_count || mode_b >= mode_count)
        throw_error(ErrorKind::invalid_argument, "invalid mode pair");

    const double s = 1.0 / std::sqrt(2.0);
    const Complex ph = std::exp(Complex(0.0, phase));
    Eigen::Matrix2cd b;
    b << s, s * ph, s, -s * ph;

    // Hermitian logarithm of the transfer matrix. B is unitary and never
    // degenerate for this family, so the eigenbasis is orthonormal.
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(b);
    Eigen::Matrix2cd k2 = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i) {
        const Complex lam = es.eigenvalues()(i);
        const Eigen::Vector2cd v = es.eigenvectors().col(i).normalized();
        k2 += std::arg(lam) * (v * v.adjoint());
    }
    Eigen::Matrix2cd check = Eigen::Matrix2cd::Zero();
    for (int i = 0; i < 2; ++i) {
        const Eigen::Vector2cd v = es.eigenvectors().col(i).normalized();
        check += std::exp(Complex(0.0, 1.0) * std::arg(es.eigenvalues()(i))) *
                 (v * v.adjoint());
    }
    if ((check - b).cwiseAbs().maxCoeff() > 1e-12)
        throw std::logic_error("mixer transfer-matrix log failed");

    const Matrix a_a = annihilation(n_max, mode_count, mode_a);
    const Matrix a_b = annihilation(n_max, mode_count, mode_b);
    const std::array<const Matrix*, 2> ops{&a_a, &a_b};

    const int d = ipow(n_max + 1, mode_count);
    Matrix h = Matrix::Zero(d, d);
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
            h += k2(j, k) * (ops[j]->adjoint() * (*ops[k]));

    Eigen::SelfAdjointEigenSolver<Matrix> eh(h);
    const auto& w = eh.eigenvalues();
    const auto& v = eh.eigenvectors();
    Eigen::VectorXcd phases(d);
    for (int i = 0; i < d; ++i) phases(i) = std::exp(Complex(0.0, w(i)));
    return v * phases.asDiagonal() * v.adjoint();
}

FockState mix_at_node(const FockState& state, int mode_a, int mode_b,
                      double phase) {
    const Matrix u =
        mixing_unitary(state.n_max(), state.mode_count(), mode_a, mode_b, phase);
    return FockState::from_matrix(state.n_max(), state.mode_count(),
                                  u * state.matrix() * u.adjoint());
}

Matrix detection_projector(const DetectionPattern& pattern, int n_max) {
    const int d = ipow(n_max + 1, 4);
    Matrix p = Matrix::Zero(d, d);
    for (int idx = 0; idx < d; ++idx) {
        const auto occ = basis_occupations(idx, n_max, 4);
        bool match = true;
        for (int k = 0; k < 4; ++k) {
            if ((occ[k] > 0) != pattern.click[k]) {
                match = false;
                break;
            }
        }
        if (match) p(idx, idx) = 1.0;
    }
    return p;
}

namespace {

// Extracts the diagonal populations and the single |01><10| coherence of a
// two-mode state, rejecting states whose off-diagonal support extends
// further.
struct XClassState {
    Eigen::MatrixXd pop;  // pop(m, n) = <mn|rho|mn>
    Complex coherence;    // <10|rho|01>
};

XClassState extract_x_class(const FockState& state, const char* label) {
    if (state.mode_count() != 2)
        throw_error(ErrorKind::invalid_argument,
                    std::string(label) + ": expected a two-mode state");
    state.validate();
    const int levels = state.level_count();
    const int d = state.dim();
    XClassState x;
    x.pop = Eigen::MatrixXd::Zero(levels, levels);
    const int i01 = basis_index({0, 1}, state.n_max());
    const int i10 = basis_index({1, 0}, state.n_max());
    x.coherence = state.matrix()(i10, i01);
    for (int i = 0; i < d; ++i) {
        const auto occ = basis_occupations(i, state.n_max(), 2);
        x.pop(occ[0], occ[1]) = state.matrix()(i, i).real();
        for (int j = 0; j < d; ++j) {
            if (i == j) continue;
            if ((i == i10 && j == i01) || (i == i01 && j == i10)) continue;
            if (std::abs(state.matrix()(i, j)) > kStructureTol)
                throw_error(ErrorKind::structure,
                            std::string(label) +
                                ": off-diagonal support beyond the "
                                "|01><10| coherence");
        }
    }
    return x;
}

}  // namespace

CoincidenceProbs coincidence_probs(const FockState& rho_e,
                                   const FockState& rho_s) {
    if (rho_e.n_max() != rho_s.n_max())
        throw_error(ErrorKind::invalid_argument,
                    "coincidence_probs requires equal cutoffs");
    const XClassState e = extract_x_class(rho_e, "rho_e");
    const XClassState s = extract_x_class(rho_s, "rho_s");

    const int levels = rho_e.level_count();

    // Diagonal sectors: node A receives (m_ea, n_sa), node B (m_eb, n_sb);
    // a one-click-per-node pattern needs all photons at a node in the
    // clicked port.
    double diag = 0.0;
    for (int mea = 0; mea < levels; ++mea)
        for (int meb = 0; meb < levels; ++meb) {
            const double pe = e.pop(mea, meb);
            if (pe == 0.0) continue;
            for (int nsa = 0; nsa < levels; ++nsa)
                for (int nsb = 0; nsb < levels; ++nsb) {
                    const double ps = s.pop(nsa, nsb);
                    if (ps == 0.0) continue;
                    diag += pe * ps * all_one_port(mea, nsa) *
                            all_one_port(meb, nsb);
                }
        }

    // Interference between |10>_E|01>_S and |01>_E|10>_S, the only
    // coherence that survives the per-node photon-number superselection of
    // the diagonal projectors.
    const double cross = 0.5 * (std::conj(e.coherence) * s.coherence).real();

    CoincidenceProbs n;
    n.n13 = diag + cross;
    n.n24 = diag + cross;
    n.n14 = diag - cross;
    n.n23 = diag - cross;
    return n;
}

double visibility_from_counts(double n13, double n14, double n23, double n24) {
    if (n13 < 0 || n14 < 0 || n23 < 0 || n24 < 0)
        throw_error(ErrorKind::invalid_argument, "counts must be nonnegative");
    const double total = n13 + n14 + n23 + n24;
    if (total <= 0.0)
        throw_error(ErrorKind::domain,
                    "visibility undefined for all-zero counts");
    return (n13 + n24 - n14 - n23) / total;
}

double visibility_from_counts(const CoincidenceProbs& n) {
    return visibility_from_counts(n.n13, n.n14, n.n23, n.n24);
}

double concurrence_x_state(const FockState& rho) {
    if (rho.mode_count() != 2 || rho.n_max() != 1)
        throw_error(ErrorKind::invalid_argument,
                    "concurrence expects a two-mode state at n_max = 1");
    const Matrix& m = rho.matrix();
    // Basis order |00>,|01>,|10>,|11>. Anything outside the X pattern is a
    // structure violation.
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j) continue;
            if ((i == 1 && j == 2) || (i == 2 && j == 1)) continue;
            if (std::abs(m(i, j)) > kStructureTol)
                throw_error(ErrorKind::structure,
                            "state does not have the X structure");
        }
    const double p00 = m(0, 0).real();
    const double p11 = m(3, 3).real();
    const double d = std::abs(m(2, 1));
    return 2.0 * std::max(0.0, d - std::sqrt(std::max(0.0, p00 * p11)));
}

}  // namespace fringe::fock
