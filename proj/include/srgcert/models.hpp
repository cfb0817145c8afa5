#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "srgcert/lincore.hpp"

namespace srgcert {

inline constexpr double kNominalOmega = 2.0 * std::numbers::pi * 50.0;

/// Per-unit controller gains; unused loops stay at zero.
struct ControllerParams {
    double k_ccp = 0.0, k_cci = 0.0; // current loop
    double k_pcp = 0.0, k_pci = 0.0; // active power loop (GFL)
    double k_vcp = 0.0, k_vci = 0.0; // reactive/voltage loop
    double k_pllp = 0.0, k_plli = 0.0;
    double j = 0.0, d = 0.0; // GFM swing
};

/// Per-unit filter. l_f and c_f are reactance/susceptance at omega0, so the
/// dynamic terms enter as s*l_f/omega0 and s*c_f/omega0.
struct FilterParams {
    double r_f = 0.0;
    double l_f = 0.0;
    double c_f = 0.0;
    double omega0 = kNominalOmega;
};

struct OperatingPoint {
    double i_d0 = 0.0;
    double i_q0 = 0.0;
    double v_d0 = 1.0;
    double v_q0 = 0.0;
};

/// Shifted geometric series for (M(s) - i_q0 v_d0)^{-1}.
struct SeriesApproxConfig {
    double alpha = -15.0;
    int order = 1;
};

enum class ConverterKind { gfl, gfm, identity };

std::string to_string(ConverterKind k);
ConverterKind converter_kind_from_string(const std::string& s);

struct ConverterPlacement {
    int node = 0;
    double theta = 0.0;
    ConverterKind kind = ConverterKind::gfl;
    double bound_radius = 1.0; ///< operating-current disk
};

void validate(const ControllerParams& c, ConverterKind kind);
void validate(const FilterParams& f);

/// Scalar building blocks shared by both converter types, evaluated at s.
struct LoopScalars {
    cplx g1;   ///< G_CC / (s L' + R + G_CC)
    cplx g2;   ///< 1 / (s L' + R + G_CC)
    cplx gpc;  ///< power loop PI
    cplx gvc;  ///< voltage/reactive loop PI
    cplx gpll; ///< PLL PI
};

LoopScalars loop_scalars(const ControllerParams& c, const FilterParams& f, cplx s);

/// Y(gamma, s) = Y0 + i_d0 Y1 + i_q0 Y2 in the global frame (PLL-referred).
AffineLpvModel gfl_affine(const ControllerParams& c, const FilterParams& f);

/// Exact grid-forming admittance at s = j omega.
CMatrix gfm_exact(const ControllerParams& c, const FilterParams& f, const OperatingPoint& op, double omega);

/// Affine model in the monomials of (i_d0, i_q0) produced by the truncated series.
AffineLpvModel gfm_affine(const ControllerParams& c, const FilterParams& f, const SeriesApproxConfig& cfg,
                          double v_d0 = 1.0);

/// Worst |i_q0 v_d0 + alpha| / |M(j omega) + alpha| over a grid and |i_q0| <= radius.
double series_divergence_ratio(const ControllerParams& c, const SeriesApproxConfig& cfg,
                               const std::vector<double>& omegas, double radius, double v_d0 = 1.0);

/// J(theta) Y J(-theta) with J the planar rotation.
CMatrix rotate_global(const CMatrix& y, double theta);

/// Generation convention: i_d0 = -P, i_q0 = Q at v = (1, 0).
OperatingPoint setpoint_to_currents(double p, double q);
void currents_to_setpoint(const OperatingPoint& op, double& p, double& q);

/// A converter ready for analysis: its certificate model and its exact model.
class ConverterModel {
public:
    ConverterModel(ConverterKind kind, ControllerParams ctrl, FilterParams filt, SeriesApproxConfig series = {});

    ConverterKind kind() const { return kind_; }
    const ControllerParams& controller() const { return ctrl_; }
    const FilterParams& filter() const { return filt_; }
    const SeriesApproxConfig& series() const { return series_; }

    /// Affine model used by the certificate (exact for GFL, series for GFM).
    const AffineLpvModel& certificate_model() const { return affine_; }
    std::vector<double> gamma(const OperatingPoint& op) const;

    /// Exact local admittance (before frame rotation).
    CMatrix exact(const OperatingPoint& op, double omega) const;

    /// Open right-half-plane poles of the exact admittance at this operating point.
    int open_loop_rhp_poles(const OperatingPoint& op) const;

private:
    ConverterKind kind_;
    ControllerParams ctrl_;
    FilterParams filt_;
    SeriesApproxConfig series_;
    AffineLpvModel affine_;
};

} // namespace srgcert
