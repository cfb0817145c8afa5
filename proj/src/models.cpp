#include "srgcert/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "srgcert/errors.hpp"

namespace srgcert {

namespace {

using Mat2 = Eigen::Matrix2cd;

cplx pi_at(double kp, double ki, cplx s, const char* what) {
    if (ki != 0.0 && s == cplx(0.0)) throw NumericalError(std::string("pole: integrator of ") + what, 0.0);
    return ki == 0.0 ? cplx(kp) : kp + ki / s;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Exponent pair (a, b) stands for i_d0^a * i_q0^b.
using Exponents = std::pair<int, int>;

std::vector<Exponents> gfm_monomials(int order) {
    std::vector<Exponents> out;
    auto add = [&out](int a, int b) {
        if (a == 0 && b == 0) return;
        if (std::find(out.begin(), out.end(), Exponents{a, b}) == out.end()) out.emplace_back(a, b);
    };
    for (int j = 0; j <= order; ++j) {
        add(1, j + 1);
        add(0, j + 1);
        add(0, j + 2);
        add(2, j);
        add(0, j);
    }
    std::sort(out.begin(), out.end(), [](const Exponents& x, const Exponents& y) {
        const int dx = x.first + x.second;
        const int dy = y.first + y.second;
        return dx != dy ? dx < dy : x.first < y.first;
    });
    return out;
}

cplx gfm_y0(const FilterParams& f, const LoopScalars& ls, cplx s) {
    const cplx one_minus_g1 = 1.0 - ls.g1;
    check_denominator(one_minus_g1, 1.0 + std::abs(ls.g1), s.imag(), "1 - G1");
    return (ls.g1 * ls.gvc + s * (f.c_f / f.omega0) * ls.g1 + ls.g2) / one_minus_g1;
}

cplx swing_m(const ControllerParams& c, cplx s) {
    const cplx inv = c.j * s * s + c.d * s;
    check_denominator(inv, std::abs(c.j * s * s) + std::abs(c.d * s) + 1e-300, s.imag(), "J s^2 + D s");
    return 1.0 / inv;
}

/// Per-monomial coefficient matrices of the truncated-series GFM model at s;
/// key (0,0) is the base term.
std::map<Exponents, Mat2> gfm_series_terms(const ControllerParams& c, const FilterParams& f,
                                           const SeriesApproxConfig& cfg, double vd, cplx s) {
    const LoopScalars ls = loop_scalars(c, f, s);
    const cplx y0 = gfm_y0(f, ls, s);
    const cplx m = swing_m(c, s);
    const cplx shifted = m + cfg.alpha;
    check_denominator(shifted, std::abs(m) + std::abs(cfg.alpha), s.imag(), "M(s) + alpha");

    // G = sum_j i_q0^j g_j with g_j = vd^j sum_{k>=j} C(k,j) alpha^(k-j) / (M + alpha)^(k+1).
    std::vector<cplx> gj(static_cast<std::size_t>(cfg.order) + 1, 0.0);
    for (int j = 0; j <= cfg.order; ++j) {
        cplx acc = 0.0;
        for (int k = j; k <= cfg.order; ++k)
            acc += binomial(k, j) * std::pow(cfg.alpha, k - j) / std::pow(shifted, k + 1);
        gj[static_cast<std::size_t>(j)] = std::pow(vd, j) * acc;
    }

    std::map<Exponents, Mat2> t;
    auto at = [&t](int a, int b) -> Mat2& {
        auto it = t.find({a, b});
        if (it == t.end()) it = t.emplace(Exponents{a, b}, Mat2::Zero()).first;
        return it->second;
    };
    at(0, 0)(0, 0) += y0;
    at(0, 0)(1, 1) += y0;
    for (int j = 0; j <= cfg.order; ++j) {
        const cplx g = gj[static_cast<std::size_t>(j)];
        // Y11 = Y0 - q (i - vd Y0) G
        at(1, j + 1)(0, 0) += -g;
        at(0, j + 1)(0, 0) += vd * y0 * g;
        // Y12 = -q^2 G
        at(0, j + 2)(0, 1) += -g;
        // Y21 = (i^2 - vd^2 Y0^2) G
        at(2, j)(1, 0) += g;
        at(0, j)(1, 0) += -vd * vd * y0 * y0 * g;
        // Y22 = Y0 + (vd Y0 + i) q G
        at(0, j + 1)(1, 1) += vd * y0 * g;
        at(1, j + 1)(1, 1) += g;
    }
    return t;
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> r(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

std::vector<double> poly_add(std::vector<double> a, const std::vector<double>& b) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
}

} // namespace

std::string to_string(ConverterKind k) {
    switch (k) {
    case ConverterKind::gfl: return "gfl";
    case ConverterKind::gfm: return "gfm";
    case ConverterKind::identity: return "identity";
    }
    return "unknown";
}

ConverterKind converter_kind_from_string(const std::string& s) {
    if (s == "gfl") return ConverterKind::gfl;
    if (s == "gfm") return ConverterKind::gfm;
    if (s == "identity") return ConverterKind::identity;
    throw std::invalid_argument("unknown converter kind '" + s + "'");
}

void validate(const ControllerParams& c, ConverterKind kind) {
    for (double v : {c.k_ccp, c.k_cci, c.k_pcp, c.k_pci, c.k_vcp, c.k_vci, c.k_pllp, c.k_plli, c.j, c.d})
        if (!std::isfinite(v)) throw std::invalid_argument("controller gains must be finite");
    if (kind == ConverterKind::gfm && !(c.j > 0.0 && c.d > 0.0))
        throw std::invalid_argument("GFM requires J > 0 and D > 0");
}

void validate(const FilterParams& f) {
    if (!(f.l_f > 0.0)) throw std::invalid_argument("filter: l_f must be > 0");
    if (!(f.c_f >= 0.0)) throw std::invalid_argument("filter: c_f must be >= 0");
    if (!(f.r_f >= 0.0)) throw std::invalid_argument("filter: r_f must be >= 0");
    if (!(f.omega0 > 0.0) || !std::isfinite(f.omega0)) throw std::invalid_argument("filter: omega0 must be > 0");
}

LoopScalars loop_scalars(const ControllerParams& c, const FilterParams& f, cplx s) {
    LoopScalars ls;
    const cplx gcc = pi_at(c.k_ccp, c.k_cci, s, "G_CC");
    const cplx zl = s * (f.l_f / f.omega0) + f.r_f;
    const cplx den = zl + gcc;
    check_denominator(den, std::abs(zl) + std::abs(gcc), s.imag(), "s L_f + R_f + G_CC");
    ls.g1 = gcc / den;
    ls.g2 = 1.0 / den;
    ls.gpc = pi_at(c.k_pcp, c.k_pci, s, "G_PC");
    ls.gvc = pi_at(c.k_vcp, c.k_vci, s, "G_VC");
    ls.gpll = pi_at(c.k_pllp, c.k_plli, s, "G_pll");
    return ls;
}

// ================================================================ GFL

AffineLpvModel gfl_affine(const ControllerParams& c, const FilterParams& f) {
    validate(c, ConverterKind::gfl);
    validate(f);

    struct Parts {
        cplx pc;   // 1 + G1 G_PC
        cplx vc;   // 1 + G1 G_VC
        cplx pll;  // s + G_pll
        LoopScalars ls;
        cplx s;
    };
    auto parts = [c, f](cplx s) {
        Parts p;
        p.s = s;
        p.ls = loop_scalars(c, f, s);
        p.pc = 1.0 + p.ls.g1 * p.ls.gpc;
        p.vc = 1.0 + p.ls.g1 * p.ls.gvc;
        p.pll = s + p.ls.gpll;
        check_denominator(p.pc, 1.0 + std::abs(p.ls.g1 * p.ls.gpc), s.imag(), "1 + G1 G_PC");
        check_denominator(p.vc, 1.0 + std::abs(p.ls.g1 * p.ls.gvc), s.imag(), "1 + G1 G_VC");
        check_denominator(p.pll, std::abs(s) + std::abs(p.ls.gpll), s.imag(), "s + G_pll");
        return p;
    };

    TransferMatrix y0(2, 2, [parts](cplx s) {
        const Parts p = parts(s);
        CMatrix m = CMatrix::Zero(2, 2);
        m(0, 0) = p.ls.g2 / p.pc;
        m(1, 1) = s * p.ls.g2 / (p.vc * p.pll);
        return m;
    });
    TransferMatrix y1(2, 2, [parts](cplx s) {
        const Parts p = parts(s);
        CMatrix m = CMatrix::Zero(2, 2);
        m(0, 0) = p.ls.g1 * p.ls.gpc / p.pc;
        m(1, 1) = -s * p.ls.g1 * p.ls.gvc / (p.vc * p.pll) - p.ls.gpll / p.pll;
        return m;
    });
    TransferMatrix y2(2, 2, [parts](cplx s) {
        const Parts p = parts(s);
        CMatrix m = CMatrix::Zero(2, 2);
        m(0, 1) = s * p.ls.g1 * p.ls.gpc / (p.pc * p.pll) + p.ls.gpll / p.pll;
        m(1, 0) = p.ls.g1 * p.ls.gvc / p.vc;
        return m;
    });

    AffineLpvModel model(y0, {{0, y1}, {1, y2}}, {"i_d0", "i_q0"});
    model.set_parameter_map({"i_d0", "i_q0"}, {Monomial{{1, 0}}, Monomial{{0, 1}}});
    return model;
}

// ================================================================ GFM

CMatrix gfm_exact(const ControllerParams& c, const FilterParams& f, const OperatingPoint& op, double omega) {
    const cplx s(0.0, omega);
    const LoopScalars ls = loop_scalars(c, f, s);
    const cplx y0 = gfm_y0(f, ls, s);
    const cplx m = swing_m(c, s);
    const double i = op.i_d0;
    const double q = op.i_q0;
    const double vd = op.v_d0;
    const cplx den = m - q * vd;
    check_denominator(den, std::abs(m) + std::abs(q * vd), omega, "M(s) - i_q0 v_d0");

    CMatrix y(2, 2);
    y(0, 0) = y0 - q * (i - vd * y0) / den;
    y(0, 1) = -q * q / den;
    y(1, 0) = (y0 * vd + i) * (i - vd * y0) / den;
    y(1, 1) = y0 + (y0 * vd + i) * q / den;
    return y;
}

AffineLpvModel gfm_affine(const ControllerParams& c, const FilterParams& f, const SeriesApproxConfig& cfg,
                          double v_d0) {
    validate(c, ConverterKind::gfm);
    validate(f);
    if (cfg.order < 0) throw std::invalid_argument("series order must be >= 0");
    if (!std::isfinite(cfg.alpha)) throw std::invalid_argument("series alpha must be finite");

    const std::vector<Exponents> monos = gfm_monomials(cfg.order);
    auto piece = [c, f, cfg, v_d0](Exponents e) {
        return TransferMatrix(2, 2, [c, f, cfg, v_d0, e](cplx s) {
            const auto t = gfm_series_terms(c, f, cfg, v_d0, s);
            const auto it = t.find(e);
            return CMatrix(it == t.end() ? Mat2::Zero() : it->second);
        });
    };

    std::vector<AffineTerm> terms;
    std::vector<std::string> names;
    std::vector<Monomial> map;
    const std::vector<std::string> vars{"i_d0", "i_q0"};
    for (std::size_t k = 0; k < monos.size(); ++k) {
        terms.push_back({k, piece(monos[k])});
        map.push_back(Monomial{{monos[k].first, monos[k].second}});
        names.push_back(map.back().label(vars));
    }
    AffineLpvModel model(piece({0, 0}), std::move(terms), std::move(names));
    model.set_parameter_map(vars, std::move(map));
    return model;
}

double series_divergence_ratio(const ControllerParams& c, const SeriesApproxConfig& cfg,
                               const std::vector<double>& omegas, double radius, double v_d0) {
    const double num = std::abs(cfg.alpha) + radius * std::abs(v_d0);
    double worst = 0.0;
    for (double w : omegas) {
        const cplx s(0.0, w);
        worst = std::max(worst, num / std::abs(swing_m(c, s) + cfg.alpha));
    }
    return worst;
}

// ================================================================ frames and setpoints

CMatrix rotate_global(const CMatrix& y, double theta) {
    if (y.rows() != 2 || y.cols() != 2) throw std::invalid_argument("rotate_global: expected a 2x2 matrix");
    Eigen::Matrix2d jp;
    jp << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return jp.cast<cplx>() * y * jp.transpose().cast<cplx>();
}

OperatingPoint setpoint_to_currents(double p, double q) {
    OperatingPoint op;
    op.i_d0 = -p;
    op.i_q0 = q;
    return op;
}

void currents_to_setpoint(const OperatingPoint& op, double& p, double& q) {
    p = -op.i_d0;
    q = op.i_q0;
}

// ================================================================ ConverterModel

ConverterModel::ConverterModel(ConverterKind kind, ControllerParams ctrl, FilterParams filt,
                               SeriesApproxConfig series)
    : kind_(kind), ctrl_(ctrl), filt_(filt), series_(series) {
    switch (kind_) {
    case ConverterKind::gfl: affine_ = gfl_affine(ctrl_, filt_); break;
    case ConverterKind::gfm: affine_ = gfm_affine(ctrl_, filt_, series_); break;
    case ConverterKind::identity:
        affine_ = AffineLpvModel(TransferMatrix::constant(CMatrix::Identity(2, 2)), {}, {});
        break;
    }
}

std::vector<double> ConverterModel::gamma(const OperatingPoint& op) const {
    if (kind_ == ConverterKind::identity) return {};
    return affine_.gamma_from({op.i_d0, op.i_q0});
}

CMatrix ConverterModel::exact(const OperatingPoint& op, double omega) const {
    switch (kind_) {
    case ConverterKind::gfl: return affine_.eval({op.i_d0, op.i_q0}, omega);
    case ConverterKind::gfm: return gfm_exact(ctrl_, filt_, op, omega);
    case ConverterKind::identity: return CMatrix::Identity(2, 2);
    }
    return {};
}

int ConverterModel::open_loop_rhp_poles(const OperatingPoint& op) const {
    const double lp = filt_.l_f / filt_.omega0;
    switch (kind_) {
    case ConverterKind::gfl: {
        // 1 + G1 G_X = [s D_cc + (K_CCP s + K_CCI)(K_XP s + K_XI)] / (s D_cc)
        const std::vector<double> dcc{ctrl_.k_cci, filt_.r_f + ctrl_.k_ccp, lp};
        const std::vector<double> s_dcc = poly_mul({0.0, 1.0}, dcc);
        const std::vector<double> cc{ctrl_.k_cci, ctrl_.k_ccp};
        const auto npc = poly_add(s_dcc, poly_mul(cc, {ctrl_.k_pci, ctrl_.k_pcp}));
        const auto nvc = poly_add(s_dcc, poly_mul(cc, {ctrl_.k_vci, ctrl_.k_vcp}));
        const std::vector<double> npll{ctrl_.k_plli, ctrl_.k_pllp, 1.0};
        return count_rhp_roots(npc) + count_rhp_roots(nvc) + count_rhp_roots(npll);
    }
    case ConverterKind::gfm: {
        // 1/(M - q vd) = (J s^2 + D s) / (1 - q vd (J s^2 + D s)); Y0 has no right-half-plane poles.
        const double qv = op.i_q0 * op.v_d0;
        return count_rhp_roots({1.0, -qv * ctrl_.d, -qv * ctrl_.j});
    }
    case ConverterKind::identity: return 0;
    }
    return 0;
}

} // namespace srgcert
