#ifndef GENSTORE_PIPELINE_HPP
#define GENSTORE_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "genstore/emfilter.hpp"
#include "genstore/nmfilter.hpp"
#include "genstore/ssdmodel.hpp"

namespace genstore::pipeline {

class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class HostKind : uint8_t { software, hw_short, hw_long };

// Host read mapper as a black box with an effective mapping throughput on
// unfiltered data. Defaults keep software runs compute-bound and hardware
// runs I/O-bound on SSD-H.
struct HostMapperModel {
  HostKind kind = HostKind::software;
  double throughput_gbps = 0.5;

  static HostMapperModel preset(HostKind kind);
  static HostMapperModel preset(const std::string& name);  // throws on unknown
};

const char* host_kind_name(HostKind k);

struct DmInputs {
  double size_ref_gb = 0;
  double size_readset_gb = 0;
  double ratio_filter = 0;  // fraction of the read set removed by the filter
};

// (Ref + ReadSet) / (Ref + ReadSet * (1 - ratio)).
double dm_saving(const DmInputs& in);

// Inputs for the closed-form timing bounds. Byte counts are raw (host-link)
// sizes; internal_bytes is what the in-storage filter streams from flash.
struct AnalyticInputs {
  double ref_bytes = 0;
  double readset_bytes = 0;
  double ratio_filter = 0;
  double internal_bytes = 0;
  ssdmodel::SsdConfig ssd;
  HostMapperModel host;
};

double t_ideal_isf(const AnalyticInputs& in);
double t_ideal_osf(const AnalyticInputs& in);

// Idle/active power per component; the in-storage accelerator power derives
// from the per-unit numbers at the configured channel count.
struct PowerTable {
  double host_cpu_active_w = 120.0;
  double host_cpu_idle_w = 30.0;
  double host_dram_active_w = 15.0;
  double host_dram_idle_w = 5.0;
  double ssd_active_w = 8.0;
  double ssd_idle_w = 2.0;
};

// Accelerator power in mW: per-channel units scale linearly; the comparator
// serves up to 12 channels, the hash unit up to 4; control is fixed.
// Evaluates to 26.6 mW for 8 channels.
double accel_power_mw(uint32_t channels);

struct Timeline {
  double t_total = 0;
  double t_rm = 0;           // host mapping busy time
  double t_io_external = 0;  // host-link transfer busy time
  double t_filter_internal = 0;
};

double energy_estimate(const Timeline& tl, const PowerTable& power, uint32_t channels,
                       bool accel_active);

struct EventModeStats {
  double t_filter_internal = 0;
  uint64_t batches = 0;
  double flash_utilization = 0;
  double compute_utilization = 0;
};

struct PipelineReport {
  std::string mode;  // "em", "nm", "em-analytic", "nm-analytic"
  ssdmodel::SsdConfig ssd;
  HostMapperModel host;

  // filter outcome
  uint64_t reads_total = 0;
  uint64_t reads_filtered = 0;
  uint64_t reads_forwarded = 0;
  double ratio_filter = 0;
  uint64_t comparator_steps = 0;                   // EM only
  std::vector<uint64_t> nm_verdict_histogram;      // NM only, by verdict code

  // data movement (bytes)
  double ref_bytes = 0;
  double readset_bytes_raw = 0;
  double readset_bytes_encoded = 0;
  double forwarded_bytes_raw = 0;
  double internal_filter_bytes = 0;
  double bytes_external = 0;  // ref + forwarded (conservation invariant)

  // timings (seconds)
  double t_io_ref = 0;
  double t_io_unfiltered = 0;
  double t_io_all_reads = 0;
  double t_filter_internal = 0;
  double t_rm_unfiltered = 0;
  double t_total = 0;
  std::string filter_bound;
  double t_ideal_isf_s = 0;
  double t_ideal_osf_s = 0;
  std::optional<EventModeStats> event_mode;

  // baseline: stream reference + full read set over the external link and
  // map everything at host throughput, I/O overlapped with mapping
  double t_baseline = 0;
  double speedup = 0;

  double dm_saving_ratio = 0;
  double energy_j = 0;
  double baseline_energy_j = 0;
  double energy_ratio = 0;

  // parameter echo for provenance
  std::vector<std::pair<std::string, std::string>> params;

  std::string to_json() const;  // stable field order, schema_version inside
};

// Assembles the timing/energy sections common to all modes. Callers fill the
// filter outcome and byte counts first.
void finish_report(PipelineReport& r, const PowerTable& power, bool event_mode);

struct RunOptions {
  unsigned threads = 1;
  bool emit_locations = false;
  bool event_mode = false;
  double ref_raw_bytes = 0;  // Size_Ref (genome + host index), bytes
  PowerTable power;
};

struct EmRunResult {
  PipelineReport report;
  std::vector<emfilter::EmDecision> decisions;  // SRTable scan order
  std::vector<uint64_t> bypass_ids;             // ambiguous reads, id order
  std::vector<uint8_t> forwarded;               // bitmap indexed by read id
};

struct NmRunResult {
  PipelineReport report;
  std::vector<nmfilter::NmDecision> decisions;  // input order
  std::vector<uint8_t> forwarded;
};

// Runs the real filter and wraps it in the SSD/host timing model. Reads with
// ambiguous bases bypass the EM filter and are always forwarded.
EmRunResult run_em_pipeline(const seqio::ReadSet& reads, const index::SRTable& srtable,
                            const index::SKIndex& skindex, const ssdmodel::SsdConfig& ssd,
                            const HostMapperModel& host, const RunOptions& opts);

// KmerIndex must fit the modeled internal DRAM (CapacityError otherwise).
NmRunResult run_nm_pipeline(const seqio::ReadSet& reads, const index::KmerIndex& kindex,
                            const nmfilter::NmParams& params,
                            const ssdmodel::SsdConfig& ssd, const HostMapperModel& host,
                            const RunOptions& opts);

struct AnalyticOptions {
  std::string mode = "em";  // "em" or "nm"
  double ref_gb = 0;
  double readset_gb = 0;
  double ratio_filter = 0;
  double internal_gb = -1;  // <0: mode default (em: 2x readset, nm: readset/4)
  bool event_mode = false;
  PowerTable power;
};

PipelineReport run_analytic(const AnalyticOptions& in, const ssdmodel::SsdConfig& ssd,
                            const HostMapperModel& host);

}  // namespace genstore::pipeline

#endif
