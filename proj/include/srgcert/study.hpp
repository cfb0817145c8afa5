#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "srgcert/certify.hpp"
#include "srgcert/config.hpp"
#include "srgcert/lincore.hpp"
#include "srgcert/models.hpp"
#include "srgcert/network.hpp"
#include "srgcert/oracle.hpp"

namespace srgcert {

/// Per-converter certificate inputs: the margin against the grid disk and the term metrics.
struct CertificateData {
    MarginSeries margins;
    TermMetricsSeries metrics;
};

/// Everything derived from a StudyConfig. Expensive series are computed on
/// first use and cached; the object is not meant for concurrent use.
class Study {
public:
    /// hz: the frequency section is in Hz regardless of its unit field.
    explicit Study(StudyConfig cfg, bool hz = false, std::optional<int> q = std::nullopt, unsigned threads = 0);

    const StudyConfig& config() const { return cfg_; }
    const FrequencyGrid& grid() const { return grid_; }
    const GridAdmittanceEvaluator& network() const { return *network_; }
    int q() const { return q_; }
    unsigned threads() const { return threads_; }

    std::size_t converter_count() const { return models_.size(); }
    /// Throws std::invalid_argument for a node without a converter.
    std::size_t converter_index(int node) const;
    const ConverterModel& model(std::size_t i) const { return *models_[i]; }
    const ConverterConfig& converter(std::size_t i) const { return cfg_.converters[i]; }

    /// Real-centred disks of SRG(Y_grid(j omega)) on the study grid.
    const std::vector<Disk>& grid_disks();
    const CertificateData& certificate(std::size_t i);
    FeasibleRegion region(std::size_t i);

    /// Nyquist verdict with every converter at the given operating point.
    OracleVerdict oracle(const std::vector<OperatingPoint>& ops) const;
    OracleVerdict oracle_at_setpoints() const;

    SweepReport verify(int resolution);

    FrequencyGrid oracle_grid() const;

private:
    StudyConfig cfg_;
    FrequencyGrid grid_;
    int q_;
    unsigned threads_;
    std::unique_ptr<GridAdmittanceEvaluator> network_;
    std::vector<std::unique_ptr<ConverterModel>> models_;
    std::optional<std::vector<Disk>> disks_;
    std::vector<std::optional<CertificateData>> certs_;
};

} // namespace srgcert
