#ifndef GENSTORE_SSDMODEL_HPP
#define GENSTORE_SSDMODEL_HPP

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace genstore::ssdmodel {

class UnknownPresetError : public std::runtime_error {
 public:
  explicit UnknownPresetError(const std::string& name)
      : std::runtime_error("unknown SSD preset: " + name) {}
};

// SSD geometry and bandwidth parameters. Bandwidths use decimal GB; DRAM
// capacity uses binary GiB; page sizes use KiB.
struct SsdConfig {
  std::string name = "custom";
  uint32_t channels = 8;
  uint32_t dies_per_channel = 4;
  uint32_t planes_per_die = 2;
  uint32_t page_kib = 16;
  double channel_bw_gbps = 1.2;
  double external_bw_gbps = 0.5;
  double nand_read_us = 45.0;
  double dram_gib = 4.0;
  double accel_flush_s = 0.0;  // FTL metadata flush when entering accelerator mode

  void validate() const;

  double internal_bw_bytes_per_s() const { return channel_bw_gbps * 1e9 * channels; }
  double external_bw_bytes_per_s() const { return external_bw_gbps * 1e9; }
  double internal_external_ratio() const { return channel_bw_gbps * channels / external_bw_gbps; }
  uint64_t dram_bytes() const { return uint64_t(dram_gib * double(uint64_t(1) << 30)); }

  // One multi-plane read across every chip.
  uint64_t batch_bytes() const {
    return uint64_t(channels) * dies_per_channel * planes_per_die * page_kib * 1024;
  }
};

struct BatchPlan {
  uint64_t batch_bytes = 0;
  uint64_t buffer_bytes = 0;  // 2 structures x 2 batches (double buffering)
};

BatchPlan batch_plan(const SsdConfig& cfg);

// SSD-L, SSD-M, SSD-H.
SsdConfig preset(const std::string& name);
std::vector<std::string> preset_names();
bool is_preset_name(const std::string& name);

enum class Bound : uint8_t {
  bandwidth,      // internal channel bandwidth
  flash_latency,  // NAND array reads dominate
  host_link,      // external interface
};

const char* bound_name(Bound b);

struct StreamTime {
  double seconds = 0;
  Bound bound = Bound::bandwidth;
};

StreamTime stream_time_internal(double bytes, const SsdConfig& cfg);
StreamTime stream_time_external(double bytes, const SsdConfig& cfg);

// Block-set placement: one mapping entry per set of same-offset blocks
// across a die's planes, 4 bytes each. page_mapped_bytes is the
// conventional 4-bytes-per-4KiB L2P footprint for the same structure.
struct BlockSetPlacement {
  double block_mb = 0;
  uint64_t dies_total = 0;
  uint64_t set_bytes = 0;
  uint64_t mapping_entries = 0;
  uint64_t metadata_bytes = 0;
  uint64_t page_mapped_bytes = 0;
};

BlockSetPlacement placement_metadata(double structure_bytes, const SsdConfig& cfg,
                                     double block_mb);

struct BatchEvent {
  uint64_t index = 0;
  double fetch_start = 0, fetch_end = 0;
  double compute_start = 0, compute_end = 0;
};

// Two-stage fetch/compute pipeline with two batch buffers per structure:
// fetch i+1 overlaps compute i, and fetch i+2 must wait until compute i
// frees its buffer.
struct Schedule {
  uint64_t batches = 0;
  double total_s = 0;
  double fetch_busy_s = 0;
  double compute_busy_s = 0;
  double flash_utilization = 0;
  double compute_utilization = 0;
  std::vector<BatchEvent> events;
};

Schedule double_buffer_schedule(double total_bytes, double compute_time_per_batch,
                                const SsdConfig& cfg, bool keep_events = false);

// Structured key-value config ("key = value", '#' comments). Keys match the
// SsdConfig field names; unknown keys are errors.
SsdConfig parse_config(std::istream& in);
SsdConfig load_config_file(const std::string& path);

// Accepts a preset name or a config file path.
SsdConfig resolve(const std::string& preset_or_path);

}  // namespace genstore::ssdmodel

#endif
