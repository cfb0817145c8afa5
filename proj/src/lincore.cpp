#include "srgcert/lincore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "srgcert/errors.hpp"

namespace srgcert {

namespace {

int degree_of(const std::vector<double>& c) {
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) {
        if (c[static_cast<std::size_t>(k)] != 0.0) return k;
    }
    return -1;
}

cplx horner(const std::vector<double>& c, cplx s) {
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * s + *it;
    return acc;
}

double magnitude_scale(const std::vector<double>& c, double abs_s) {
    double acc = 0.0;
    double p = 1.0;
    for (double ck : c) {
        acc += std::abs(ck) * p;
        p *= abs_s;
    }
    return acc;
}

} // namespace

void check_denominator(cplx den, double scale, double omega, const char* what) {
    if (!std::isfinite(den.real()) || !std::isfinite(den.imag()) || std::abs(den) <= kPoleTolerance * scale ||
        den == cplx(0.0)) {
        throw NumericalError(std::string("pole: ") + what + " vanishes", omega);
    }
}

// ---------------------------------------------------------------- RationalTransfer

RationalTransfer::RationalTransfer(std::vector<double> num, std::vector<double> den, bool require_proper)
    : num_(std::move(num)), den_(std::move(den)) {
    if (degree_of(den_) < 0) throw std::invalid_argument("RationalTransfer: denominator is identically zero");
    for (double c : num_)
        if (!std::isfinite(c)) throw std::invalid_argument("RationalTransfer: non-finite numerator coefficient");
    for (double c : den_)
        if (!std::isfinite(c)) throw std::invalid_argument("RationalTransfer: non-finite denominator coefficient");
    if (require_proper && !proper()) throw std::invalid_argument("RationalTransfer: improper transfer function");
}

RationalTransfer RationalTransfer::constant(double k) { return RationalTransfer({k}, {1.0}); }

RationalTransfer RationalTransfer::pi(double kp, double ki) { return RationalTransfer({ki, kp}, {0.0, 1.0}); }

int RationalTransfer::numerator_degree() const { return degree_of(num_); }
int RationalTransfer::denominator_degree() const { return degree_of(den_); }

cplx RationalTransfer::at(cplx s) const {
    const cplx d = horner(den_, s);
    double scale = magnitude_scale(num_, std::abs(s));
    if (scale == 0.0) scale = magnitude_scale(den_, std::abs(s));
    check_denominator(d, scale, s.imag(), "rational denominator");
    return horner(num_, s) / d;
}

// ---------------------------------------------------------------- TransferMatrix

TransferMatrix::TransferMatrix(Eigen::Index rows, Eigen::Index cols, Evaluator f)
    : rows_(rows), cols_(cols), f_(std::move(f)) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("TransferMatrix: empty shape");
    if (!f_) throw std::invalid_argument("TransferMatrix: missing evaluator");
}

TransferMatrix TransferMatrix::from_entries(const std::vector<std::vector<RationalTransfer>>& entries) {
    if (entries.empty() || entries.front().empty()) throw std::invalid_argument("TransferMatrix: empty entry grid");
    const auto rows = static_cast<Eigen::Index>(entries.size());
    const auto cols = static_cast<Eigen::Index>(entries.front().size());
    for (const auto& row : entries)
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw std::invalid_argument("TransferMatrix: ragged entry grid");
    return TransferMatrix(rows, cols, [entries, rows, cols](cplx s) {
        CMatrix m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                m(i, j) = entries[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].at(s);
        return m;
    });
}

TransferMatrix TransferMatrix::affine_inverse(const CMatrix& m0, const CMatrix& m1) {
    if (m0.rows() != m0.cols() || m1.rows() != m0.rows() || m1.cols() != m0.cols())
        throw std::invalid_argument("TransferMatrix: affine_inverse needs equal square matrices");
    return TransferMatrix(m0.rows(), m0.cols(),
                          [m0, m1](cplx s) { return checked_inverse(m0 + s * m1, s.imag(), "M0 + s M1"); });
}

TransferMatrix TransferMatrix::constant(const CMatrix& m) {
    return TransferMatrix(m.rows(), m.cols(), [m](cplx) { return m; });
}

CMatrix TransferMatrix::at(cplx s) const {
    if (!f_) throw std::logic_error("TransferMatrix: evaluation of an empty matrix");
    CMatrix m = f_(s);
    if (m.rows() != rows_ || m.cols() != cols_) throw std::logic_error("TransferMatrix: evaluator shape mismatch");
    return m;
}

CMatrix checked_inverse(const CMatrix& m, double omega, const char* what) {
    if (m.rows() != m.cols()) throw std::invalid_argument("checked_inverse: non-square matrix");
    if (m.size() == 0) return m;
    Eigen::PartialPivLU<CMatrix> lu(m);
    const double rc = lu.rcond();
    if (!(rc > 1e-14)) throw NumericalError(std::string("singular matrix: ") + what, omega);
    return lu.inverse();
}

// ---------------------------------------------------------------- Monomial

double Monomial::evaluate(const std::vector<double>& x) const {
    if (x.size() != exponents.size()) throw std::invalid_argument("Monomial: variable count mismatch");
    double v = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (int p = 0; p < exponents[i]; ++p) v *= x[i];
    return v;
}

int Monomial::degree() const {
    int d = 0;
    for (int e : exponents) d += e;
    return d;
}

std::string Monomial::label(const std::vector<std::string>& variable_names) const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i] == 0) continue;
        if (!first) os << '*';
        os << variable_names.at(i);
        if (exponents[i] > 1) os << '^' << exponents[i];
        first = false;
    }
    return first ? std::string("1") : os.str();
}

// ---------------------------------------------------------------- AffineLpvModel

AffineLpvModel::AffineLpvModel(TransferMatrix base, std::vector<AffineTerm> terms,
                               std::vector<std::string> parameter_names)
    : base_(std::move(base)), terms_(std::move(terms)), names_(std::move(parameter_names)) {
    for (const auto& t : terms_) {
        if (t.parameter >= names_.size()) throw std::invalid_argument("AffineLpvModel: term parameter out of range");
        if (t.matrix.rows() != base_.rows() || t.matrix.cols() != base_.cols())
            throw std::invalid_argument("AffineLpvModel: term shape differs from base");
    }
}

void AffineLpvModel::set_parameter_map(std::vector<std::string> variable_names, std::vector<Monomial> map) {
    if (map.size() != names_.size()) throw std::invalid_argument("AffineLpvModel: parameter map size mismatch");
    for (const auto& m : map)
        if (m.exponents.size() != variable_names.size())
            throw std::invalid_argument("AffineLpvModel: monomial arity mismatch");
    variables_ = std::move(variable_names);
    map_ = std::move(map);
}

std::vector<double> AffineLpvModel::gamma_from(const std::vector<double>& physical) const {
    if (map_.empty()) {
        if (physical.size() != names_.size()) throw std::invalid_argument("gamma_from: length mismatch");
        return physical;
    }
    std::vector<double> g;
    g.reserve(map_.size());
    for (const auto& m : map_) g.push_back(m.evaluate(physical));
    return g;
}

bool AffineLpvModel::map_is_identity() const {
    if (map_.empty()) return true;
    if (map_.size() != variables_.size()) return false;
    for (std::size_t k = 0; k < map_.size(); ++k)
        for (std::size_t i = 0; i < variables_.size(); ++i)
            if (map_[k].exponents[i] != (i == k ? 1 : 0)) return false;
    return true;
}

CMatrix AffineLpvModel::eval(const std::vector<double>& gamma, double omega) const {
    if (gamma.size() != names_.size())
        throw std::invalid_argument("eval_transfer: gamma has " + std::to_string(gamma.size()) +
                                    " entries, model has " + std::to_string(names_.size()) + " parameters");
    if (!std::isfinite(omega) || omega < 0.0) throw std::invalid_argument("eval_transfer: omega must be finite and >= 0");
    CMatrix h = base_.eval(omega);
    for (const auto& t : terms_) {
        const double g = gamma[t.parameter];
        if (g != 0.0) h += g * t.matrix.eval(omega);
    }
    return h;
}

CMatrix eval_transfer(const AffineLpvModel& model, const std::vector<double>& gamma, double omega) {
    return model.eval(gamma, omega);
}

// ---------------------------------------------------------------- FrequencyGrid

FrequencyGrid::FrequencyGrid(std::vector<double> samples, Spacing spacing)
    : samples_(std::move(samples)), spacing_(spacing) {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i]) || samples_[i] <= 0.0)
            throw std::invalid_argument("FrequencyGrid: samples must be finite and > 0");
        if (i > 0 && !(samples_[i] > samples_[i - 1]))
            throw std::invalid_argument("FrequencyGrid: samples must be strictly increasing");
    }
}

FrequencyGrid make_log_grid(double start, double stop, std::size_t count) {
    if (!(start > 0.0)) throw std::invalid_argument("make_log_grid: start must be > 0");
    if (!(stop > start)) throw std::invalid_argument("make_log_grid: stop must exceed start");
    if (count < 2) throw std::invalid_argument("make_log_grid: count must be >= 2");
    std::vector<double> w(count);
    const double l0 = std::log10(start);
    const double l1 = std::log10(stop);
    for (std::size_t i = 0; i < count; ++i)
        w[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(count - 1));
    w.front() = start;
    w.back() = stop;
    return FrequencyGrid(std::move(w), Spacing::logarithmic);
}

FrequencyGrid make_linear_grid(double start, double stop, std::size_t count) {
    if (!(start > 0.0)) throw std::invalid_argument("make_linear_grid: start must be > 0");
    if (!(stop > start)) throw std::invalid_argument("make_linear_grid: stop must exceed start");
    if (count < 2) throw std::invalid_argument("make_linear_grid: count must be >= 2");
    std::vector<double> w(count);
    for (std::size_t i = 0; i < count; ++i)
        w[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
    w.back() = stop;
    return FrequencyGrid(std::move(w), Spacing::linear);
}

int count_rhp_roots(const std::vector<double>& coeffs) {
    std::vector<double> c = coeffs;
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    // Roots at the origin are not in the open right half-plane.
    std::size_t lead = 0;
    while (lead < c.size() && c[lead] == 0.0) ++lead;
    c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(lead));
    const int n = static_cast<int>(c.size()) - 1;
    if (n < 1) return 0;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("count_rhp_roots: eigen-solver failure");
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(es.eigenvalues()[i]));
    int count = 0;
    for (int i = 0; i < n; ++i)
        if (es.eigenvalues()[i].real() > 1e-9 * std::max(1.0, scale)) ++count;
    return count;
}

} // namespace srgcert
