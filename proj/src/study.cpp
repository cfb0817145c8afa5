#include "srgcert/study.hpp"

#include <numbers>
#include <stdexcept>
#include <string>

#include "srgcert/parallel.hpp"

namespace srgcert {

Study::Study(StudyConfig cfg, bool hz, std::optional<int> q, unsigned threads)
    : cfg_(std::move(cfg)), q_(q.value_or(cfg_.analysis.q)), threads_(resolve_threads(threads)) {
    if (q_ < 8) throw std::invalid_argument("Study: q must be >= 8");
    const auto& f = cfg_.frequency;
    const double scale = (hz || f.hz) ? 2.0 * std::numbers::pi : 1.0;
    grid_ = f.linear ? make_linear_grid(f.start * scale, f.stop * scale, f.count)
                     : make_log_grid(f.start * scale, f.stop * scale, f.count);
    network_ = std::make_unique<GridAdmittanceEvaluator>(cfg_.network);
    for (const auto& c : cfg_.converters)
        models_.push_back(std::make_unique<ConverterModel>(c.placement.kind, c.controller, c.filter, c.series));
    certs_.resize(models_.size());
}

std::size_t Study::converter_index(int node) const {
    for (std::size_t i = 0; i < cfg_.converters.size(); ++i)
        if (cfg_.converters[i].placement.node == node) return i;
    throw std::invalid_argument("no converter at node " + std::to_string(node));
}

const std::vector<Disk>& Study::grid_disks() {
    if (!disks_) {
        const GridAdmittanceEvaluator& net = *network_;
        disks_ = disk_series([&net](double w) { return net(w); }, grid_, q_, threads_);
    }
    return *disks_;
}

const CertificateData& Study::certificate(std::size_t i) {
    if (i >= models_.size()) throw std::out_of_range("Study::certificate: converter index");
    if (!certs_[i]) {
        const auto& disks = grid_disks();
        const AffineLpvModel& m = models_[i]->certificate_model();
        CertificateData d;
        d.margins = margin_series(m, disks, grid_, q_, threads_);
        d.metrics = term_metrics(m, grid_, threads_);
        certs_[i] = std::move(d);
    }
    return *certs_[i];
}

FeasibleRegion Study::region(std::size_t i) {
    const CertificateData& d = certificate(i);
    return feasible_region(d.margins, d.metrics, cfg_.converters[i].placement.bound_radius);
}

FrequencyGrid Study::oracle_grid() const {
    const auto& a = cfg_.analysis;
    return make_log_grid(a.oracle_start, a.oracle_stop, a.oracle_count);
}

OracleVerdict Study::oracle(const std::vector<OperatingPoint>& ops) const {
    if (ops.size() != models_.size()) throw std::invalid_argument("Study::oracle: one operating point per converter");
    std::vector<ConverterInstance> inst;
    for (std::size_t i = 0; i < models_.size(); ++i)
        inst.push_back({models_[i].get(), ops[i], cfg_.converters[i].placement.theta});
    return nyquist_verdict(make_loop(*network_, inst), oracle_grid());
}

OracleVerdict Study::oracle_at_setpoints() const {
    std::vector<OperatingPoint> ops;
    for (const auto& c : cfg_.converters) ops.push_back(c.setpoint);
    return oracle(ops);
}

SweepReport Study::verify(int resolution) {
    SweepSystem sys;
    sys.grid = network_.get();
    sys.oracle_grid = oracle_grid();
    for (std::size_t i = 0; i < models_.size(); ++i) {
        const CertificateData& d = certificate(i);
        const auto& c = cfg_.converters[i];
        sys.converters.push_back(
            {models_[i].get(), c.placement.node, c.setpoint, c.placement.theta, c.placement.bound_radius, &d.margins,
             &d.metrics});
    }
    return soundness_sweep(sys, resolution, threads_);
}

} // namespace srgcert
