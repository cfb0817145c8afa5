#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace srgcert {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;

/// Relative threshold below which a denominator counts as a pole.
inline constexpr double kPoleTolerance = 1e-12;

/// Throws NumericalError when |den| is negligible against `scale`.
void check_denominator(cplx den, double scale, double omega, const char* what);

/// Scalar rational function with real coefficients in ascending powers of s.
class RationalTransfer {
public:
    RationalTransfer(std::vector<double> num, std::vector<double> den, bool require_proper = false);

    static RationalTransfer constant(double k);
    /// kp + ki/s
    static RationalTransfer pi(double kp, double ki);

    cplx at(cplx s) const;
    cplx eval(double omega) const { return at(cplx(0.0, omega)); }

    const std::vector<double>& numerator() const { return num_; }
    const std::vector<double>& denominator() const { return den_; }
    int numerator_degree() const;
    int denominator_degree() const;
    bool proper() const { return numerator_degree() <= denominator_degree(); }

private:
    std::vector<double> num_;
    std::vector<double> den_;
};

/// Square or rectangular transfer matrix evaluated pointwise in s.
class TransferMatrix {
public:
    using Evaluator = std::function<CMatrix(cplx)>;

    TransferMatrix() = default;
    TransferMatrix(Eigen::Index rows, Eigen::Index cols, Evaluator f);

    static TransferMatrix from_entries(const std::vector<std::vector<RationalTransfer>>& entries);
    /// (M0 + s M1)^{-1}, inverted numerically at each point.
    static TransferMatrix affine_inverse(const CMatrix& m0, const CMatrix& m1);
    static TransferMatrix constant(const CMatrix& m);

    CMatrix at(cplx s) const;
    CMatrix eval(double omega) const { return at(cplx(0.0, omega)); }

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }

private:
    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    Evaluator f_;
};

/// Inverse with a conditioning check; `what` names the matrix in the error.
CMatrix checked_inverse(const CMatrix& m, double omega, const char* what);

/// Product of physical variables raised to integer powers, e.g. i_d0^2 * i_q0.
struct Monomial {
    std::vector<int> exponents;

    double evaluate(const std::vector<double>& x) const;
    std::string label(const std::vector<std::string>& variable_names) const;
    int degree() const;
};

struct AffineTerm {
    std::size_t parameter = 0;
    TransferMatrix matrix;
};

/// H(gamma, s) = H0(s) + sum_k gamma_k H_k(s).
///
/// The optional parameter map expresses each gamma_k as a monomial in a small
/// set of physical variables (the operating currents for converter models).
class AffineLpvModel {
public:
    AffineLpvModel() = default;
    AffineLpvModel(TransferMatrix base, std::vector<AffineTerm> terms,
                   std::vector<std::string> parameter_names);

    void set_parameter_map(std::vector<std::string> variable_names, std::vector<Monomial> map);

    CMatrix eval(const std::vector<double>& gamma, double omega) const;
    CMatrix base_at(double omega) const { return base_.eval(omega); }
    CMatrix term_at(std::size_t k, double omega) const { return terms_.at(k).matrix.eval(omega); }

    std::size_t parameter_count() const { return names_.size(); }
    std::size_t term_count() const { return terms_.size(); }
    const AffineTerm& term(std::size_t k) const { return terms_.at(k); }
    const std::vector<std::string>& parameter_names() const { return names_; }
    Eigen::Index rows() const { return base_.rows(); }
    Eigen::Index cols() const { return base_.cols(); }

    bool has_parameter_map() const { return !map_.empty(); }
    const std::vector<Monomial>& parameter_map() const { return map_; }
    const std::vector<std::string>& variable_names() const { return variables_; }
    /// gamma from physical variables; identity when no map is set.
    std::vector<double> gamma_from(const std::vector<double>& physical) const;
    /// True when gamma_k equals physical variable k for every k.
    bool map_is_identity() const;

private:
    TransferMatrix base_;
    std::vector<AffineTerm> terms_;
    std::vector<std::string> names_;
    std::vector<std::string> variables_;
    std::vector<Monomial> map_;
};

CMatrix eval_transfer(const AffineLpvModel& model, const std::vector<double>& gamma, double omega);

enum class Spacing { logarithmic, linear, custom };

class FrequencyGrid {
public:
    FrequencyGrid() = default;
    FrequencyGrid(std::vector<double> samples, Spacing spacing = Spacing::custom);

    const std::vector<double>& samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    double operator[](std::size_t i) const { return samples_[i]; }
    Spacing spacing() const { return spacing_; }
    bool empty() const { return samples_.empty(); }

private:
    std::vector<double> samples_;
    Spacing spacing_ = Spacing::custom;
};

FrequencyGrid make_log_grid(double start, double stop, std::size_t count);
FrequencyGrid make_linear_grid(double start, double stop, std::size_t count);

/// Number of roots of sum_k c_k s^k with Re > 0, counted with multiplicity.
int count_rhp_roots(const std::vector<double>& coeffs);

} // namespace srgcert
