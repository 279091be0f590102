#include "genstore/ssdmodel.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace genstore::ssdmodel {

void SsdConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0)) throw std::invalid_argument(std::string(what) + " must be positive");
  };
  positive(channels, "channels");
  positive(dies_per_channel, "dies_per_channel");
  positive(planes_per_die, "planes_per_die");
  positive(page_kib, "page_kib");
  positive(channel_bw_gbps, "channel_bw_gbps");
  positive(external_bw_gbps, "external_bw_gbps");
  positive(nand_read_us, "nand_read_us");
  positive(dram_gib, "dram_gib");
  if (accel_flush_s < 0) throw std::invalid_argument("accel_flush_s must be >= 0");
}

BatchPlan batch_plan(const SsdConfig& cfg) {
  BatchPlan p;
  p.batch_bytes = cfg.batch_bytes();
  p.buffer_bytes = 2 * 2 * p.batch_bytes;
  return p;
}

SsdConfig preset(const std::string& name) {
  SsdConfig c;
  c.name = name;
  if (name == "SSD-L") {
    c.channels = 8;
    c.external_bw_gbps = 0.5;
  } else if (name == "SSD-M") {
    c.channels = 16;
    c.external_bw_gbps = 3.5;
  } else if (name == "SSD-H") {
    c.channels = 16;
    c.external_bw_gbps = 7.0;
  } else {
    throw UnknownPresetError(name);
  }
  return c;
}

std::vector<std::string> preset_names() { return {"SSD-L", "SSD-M", "SSD-H"}; }

bool is_preset_name(const std::string& name) {
  return name == "SSD-L" || name == "SSD-M" || name == "SSD-H";
}

const char* bound_name(Bound b) {
  switch (b) {
    case Bound::bandwidth: return "bandwidth";
    case Bound::flash_latency: return "flash_latency";
    case Bound::host_link: return "host_link";
  }
  return "?";
}

StreamTime stream_time_internal(double bytes, const SsdConfig& cfg) {
  if (bytes < 0) throw std::invalid_argument("bytes must be >= 0");
  StreamTime t;
  if (bytes == 0) return t;
  double t_bw = bytes / cfg.internal_bw_bytes_per_s();
  double batches = std::ceil(bytes / double(cfg.batch_bytes()));
  double t_flash = batches * cfg.nand_read_us * 1e-6;
  if (t_flash > t_bw) {
    t.seconds = t_flash;
    t.bound = Bound::flash_latency;
  } else {
    t.seconds = t_bw;
    t.bound = Bound::bandwidth;
  }
  return t;
}

StreamTime stream_time_external(double bytes, const SsdConfig& cfg) {
  if (bytes < 0) throw std::invalid_argument("bytes must be >= 0");
  return StreamTime{bytes / cfg.external_bw_bytes_per_s(), Bound::host_link};
}

BlockSetPlacement placement_metadata(double structure_bytes, const SsdConfig& cfg,
                                     double block_mb) {
  if (!(structure_bytes > 0) || !(block_mb > 0))
    throw std::invalid_argument("placement sizes must be positive");
  BlockSetPlacement p;
  p.block_mb = block_mb;
  p.dies_total = uint64_t(cfg.channels) * cfg.dies_per_channel;
  p.set_bytes = uint64_t(std::llround(block_mb * 1e6)) * cfg.planes_per_die;
  p.mapping_entries = uint64_t(std::ceil(structure_bytes / double(p.set_bytes)));
  p.metadata_bytes = p.mapping_entries * 4;
  p.page_mapped_bytes = uint64_t(std::ceil(structure_bytes / 4096.0)) * 4;
  return p;
}

Schedule double_buffer_schedule(double total_bytes, double compute_time_per_batch,
                                const SsdConfig& cfg, bool keep_events) {
  if (!(total_bytes >= 0) || compute_time_per_batch < 0)
    throw std::invalid_argument("schedule inputs must be non-negative");
  Schedule s;
  if (total_bytes == 0) return s;

  const double batch = double(cfg.batch_bytes());
  const double bw = cfg.internal_bw_bytes_per_s();
  const double nand_s = cfg.nand_read_us * 1e-6;
  s.batches = uint64_t(std::ceil(total_bytes / batch));
  if (keep_events) s.events.reserve(size_t(s.batches));

  double fetch_free = 0;    // when the fetch engine is available
  double compute_free = 0;  // when the compute stage is available
  double prev_compute_end = 0, prev2_compute_end = 0;
  for (uint64_t i = 0; i < s.batches; i++) {
    double bytes_i = (i + 1 < s.batches) ? batch : total_bytes - batch * double(i);
    double fetch_time = std::max(nand_s, bytes_i / bw);
    // a third batch may not start fetching until compute released buffer i-2
    double fetch_start = std::max(fetch_free, i >= 2 ? prev2_compute_end : 0.0);
    double fetch_end = fetch_start + fetch_time;
    double compute_start = std::max(fetch_end, compute_free);
    double compute_end = compute_start + compute_time_per_batch;
    fetch_free = fetch_end;
    compute_free = compute_end;
    prev2_compute_end = prev_compute_end;
    prev_compute_end = compute_end;
    s.fetch_busy_s += fetch_time;
    s.compute_busy_s += compute_time_per_batch;
    if (keep_events)
      s.events.push_back(BatchEvent{i, fetch_start, fetch_end, compute_start, compute_end});
    s.total_s = compute_end;
  }
  s.flash_utilization = s.total_s > 0 ? s.fetch_busy_s / s.total_s : 0;
  s.compute_utilization = s.total_s > 0 ? s.compute_busy_s / s.total_s : 0;
  return s;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

}  // namespace

SsdConfig parse_config(std::istream& in) {
  SsdConfig c;
  c.name = "custom";
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    lineno++;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    try {
      if (key == "name") c.name = val;
      else if (key == "channels") c.channels = uint32_t(std::stoul(val));
      else if (key == "dies_per_channel") c.dies_per_channel = uint32_t(std::stoul(val));
      else if (key == "planes_per_die") c.planes_per_die = uint32_t(std::stoul(val));
      else if (key == "page_kib") c.page_kib = uint32_t(std::stoul(val));
      else if (key == "channel_bw_gbps") c.channel_bw_gbps = std::stod(val);
      else if (key == "external_bw_gbps") c.external_bw_gbps = std::stod(val);
      else if (key == "nand_read_us") c.nand_read_us = std::stod(val);
      else if (key == "dram_gib") c.dram_gib = std::stod(val);
      else if (key == "accel_flush_s") c.accel_flush_s = std::stod(val);
      else
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": bad value '" + val + "'");
    }
  }
  c.validate();
  return c;
}

SsdConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open SSD config: " + path);
  return parse_config(f);
}

SsdConfig resolve(const std::string& preset_or_path) {
  if (is_preset_name(preset_or_path)) return preset(preset_or_path);
  return load_config_file(preset_or_path);
}

}  // namespace genstore::ssdmodel
