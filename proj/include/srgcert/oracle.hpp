#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "srgcert/certify.hpp"
#include "srgcert/lincore.hpp"
#include "srgcert/models.hpp"
#include "srgcert/network.hpp"

namespace srgcert {

/// Return ratio L(j omega) = Y_grid^{-1} Ytilde with its open-loop RHP pole count.
class LoopEvaluator {
public:
    LoopEvaluator(std::function<CMatrix(double)> f, Eigen::Index size, int open_loop_rhp_poles);

    CMatrix operator()(double omega) const;
    Eigen::Index size() const { return size_; }
    int open_loop_rhp_poles() const { return rhp_poles_; }

private:
    std::function<CMatrix(double)> f_;
    Eigen::Index size_;
    int rhp_poles_;
};

struct ConverterInstance {
    const ConverterModel* model = nullptr;
    OperatingPoint op;
    double theta = 0.0;
};

/// Closed loop of the grid with one exact converter model per converter node (in node order).
LoopEvaluator make_loop(const GridAdmittanceEvaluator& grid, const std::vector<ConverterInstance>& converters);

enum class Verdict { stable, unstable, inconclusive };
std::string to_string(Verdict v);

struct OracleVerdict {
    Verdict verdict = Verdict::inconclusive;
    bool stable = false;
    int encirclements = 0;       ///< net clockwise encirclements of -1 by the eigenloci
    int open_loop_rhp_poles = 0;
    int closed_loop_rhp_poles = 0;
    double min_eigenlocus_distance_to_minus_one = 0.0;
    int origin_order = 0;        ///< pole order of det(I + L) at s = 0
    int infinity_order = 0;      ///< growth order of det(I + L) as |s| -> infinity
    double winding_residual = 0.0;
    std::vector<double> omega_used;
    std::string note;
};

/// Generalized Nyquist test on the positive half of the imaginary axis,
/// mirrored by conjugate symmetry. The grid should span well below the
/// slowest and above the fastest dynamics; it is refined adaptively.
OracleVerdict nyquist_verdict(const LoopEvaluator& loop, const FrequencyGrid& grid);

/// Default oracle grid: 1e-7 .. 1e9 rad/s, 800 log samples.
FrequencyGrid default_oracle_grid();

// ---- soundness audit

struct SweepConverter {
    const ConverterModel* model = nullptr;
    int node = 0;
    OperatingPoint nominal;
    double theta = 0.0;
    double bound = 1.0;
    const MarginSeries* margins = nullptr;
    const TermMetricsSeries* metrics = nullptr;
};

struct SweepSystem {
    const GridAdmittanceEvaluator* grid = nullptr;
    std::vector<SweepConverter> converters; ///< in converter-node order
    FrequencyGrid oracle_grid;
};

struct SweepRow {
    std::size_t converter = 0;
    int node = 0;
    double i_d0 = 0.0;
    double i_q0 = 0.0;
    bool certified = false;
    OracleVerdict oracle;
    double margin_min = 0.0; ///< certificate slack of the swept converter
};

struct SweepReport {
    std::vector<SweepRow> rows;
    std::size_t certified = 0;
    std::size_t oracle_stable = 0;
    std::size_t inconclusive = 0;
    std::size_t failures = 0; ///< certified but oracle-unstable
    std::size_t certified_inconclusive = 0;

    /// Oracle-stable points that are not certified, as a fraction of oracle-stable points.
    double conservatism() const;
};

/// Each converter in turn sweeps a resolution x resolution grid over its
/// bound disk while the others hold their nominal setpoints. The oracle runs
/// at every point so that conservatism can be measured.
SweepReport soundness_sweep(const SweepSystem& system, int resolution, unsigned threads);

void write_sweep_csv(std::ostream& os, const SweepReport& report);

} // namespace srgcert
