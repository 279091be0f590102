#include "genstore/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace genstore::pipeline {

HostMapperModel HostMapperModel::preset(HostKind kind) {
  switch (kind) {
    case HostKind::software: return {HostKind::software, 0.5};
    case HostKind::hw_short: return {HostKind::hw_short, 15.0};
    case HostKind::hw_long: return {HostKind::hw_long, 12.0};
  }
  throw std::invalid_argument("bad host kind");
}

HostMapperModel HostMapperModel::preset(const std::string& name) {
  if (name == "software") return preset(HostKind::software);
  if (name == "hw-short") return preset(HostKind::hw_short);
  if (name == "hw-long") return preset(HostKind::hw_long);
  throw std::invalid_argument("unknown host model: " + name);
}

const char* host_kind_name(HostKind k) {
  switch (k) {
    case HostKind::software: return "software";
    case HostKind::hw_short: return "hw-short";
    case HostKind::hw_long: return "hw-long";
  }
  return "?";
}

double dm_saving(const DmInputs& in) {
  if (in.size_ref_gb < 0 || in.size_readset_gb < 0)
    throw std::invalid_argument("sizes must be >= 0");
  if (in.ratio_filter < 0 || in.ratio_filter > 1)
    throw std::invalid_argument("ratio_filter must be in [0, 1]");
  double num = in.size_ref_gb + in.size_readset_gb;
  double den = in.size_ref_gb + in.size_readset_gb * (1.0 - in.ratio_filter);
  if (den == 0) return 1.0;
  return num / den;
}

double t_ideal_isf(const AnalyticInputs& in) {
  double t_ref = ssdmodel::stream_time_external(in.ref_bytes, in.ssd).seconds;
  double unfiltered = in.readset_bytes * (1.0 - in.ratio_filter);
  double t_io = ssdmodel::stream_time_external(unfiltered, in.ssd).seconds;
  double t_rm = unfiltered / (in.host.throughput_gbps * 1e9);
  return t_ref + std::max(t_io, t_rm);
}

double t_ideal_osf(const AnalyticInputs& in) {
  double t_ref = ssdmodel::stream_time_external(in.ref_bytes, in.ssd).seconds;
  double t_io_all = ssdmodel::stream_time_external(in.readset_bytes, in.ssd).seconds;
  double unfiltered = in.readset_bytes * (1.0 - in.ratio_filter);
  double t_rm = unfiltered / (in.host.throughput_gbps * 1e9);
  return t_ref + std::max(t_io_all, t_rm);
}

double accel_power_mw(uint32_t channels) {
  auto ceil_div = [](uint32_t a, uint32_t b) { return (a + b - 1) / b; };
  double comparator = 0.14 * ceil_div(channels, 12);
  double kmer_window = 0.27 * 2 * channels;
  double hash_unit = 1.8 * ceil_div(channels, 4);
  double location_buffer = 0.37375 * channels;
  double chaining_buffer = 0.95 * channels;
  double chaining_pe = 0.98 * channels;
  double control = 0.11;
  return comparator + kmer_window + hash_unit + location_buffer + chaining_buffer +
         chaining_pe + control;
}

double energy_estimate(const Timeline& tl, const PowerTable& p, uint32_t channels,
                       bool accel_active) {
  double t_cpu = std::min(tl.t_total, tl.t_rm);
  double t_dram = std::min(tl.t_total, tl.t_rm + tl.t_io_external);
  double t_ssd = std::min(tl.t_total, tl.t_io_external + tl.t_filter_internal);

  double e = 0;
  e += p.host_cpu_idle_w * tl.t_total + (p.host_cpu_active_w - p.host_cpu_idle_w) * t_cpu;
  e += p.host_dram_idle_w * tl.t_total + (p.host_dram_active_w - p.host_dram_idle_w) * t_dram;
  e += p.ssd_idle_w * tl.t_total + (p.ssd_active_w - p.ssd_idle_w) * t_ssd;
  if (accel_active) e += accel_power_mw(channels) * 1e-3 * tl.t_filter_internal;
  return e;
}

void finish_report(PipelineReport& r, const PowerTable& power, bool event_mode) {
  const auto& ssd = r.ssd;
  r.bytes_external = r.ref_bytes + r.forwarded_bytes_raw;

  r.t_io_ref = ssdmodel::stream_time_external(r.ref_bytes, ssd).seconds;
  r.t_io_unfiltered = ssdmodel::stream_time_external(r.forwarded_bytes_raw, ssd).seconds;
  r.t_io_all_reads = ssdmodel::stream_time_external(r.readset_bytes_raw, ssd).seconds;
  auto internal = ssdmodel::stream_time_internal(r.internal_filter_bytes, ssd);
  r.t_filter_internal = internal.seconds;
  r.filter_bound = ssdmodel::bound_name(internal.bound);
  r.t_rm_unfiltered = r.forwarded_bytes_raw / (r.host.throughput_gbps * 1e9);
  r.t_total = ssd.accel_flush_s + r.t_io_ref +
              std::max({r.t_filter_internal, r.t_io_unfiltered, r.t_rm_unfiltered});

  if (event_mode) {
    auto sched = ssdmodel::double_buffer_schedule(r.internal_filter_bytes, 0.0, ssd);
    EventModeStats ev;
    ev.t_filter_internal = sched.total_s;
    ev.batches = sched.batches;
    ev.flash_utilization = sched.flash_utilization;
    ev.compute_utilization = sched.compute_utilization;
    r.event_mode = ev;
  }

  AnalyticInputs ai;
  ai.ref_bytes = r.ref_bytes;
  ai.readset_bytes = r.readset_bytes_raw;
  ai.ratio_filter = r.ratio_filter;
  ai.internal_bytes = r.internal_filter_bytes;
  ai.ssd = ssd;
  ai.host = r.host;
  r.t_ideal_isf_s = t_ideal_isf(ai);
  r.t_ideal_osf_s = t_ideal_osf(ai);

  double t_rm_all = r.readset_bytes_raw / (r.host.throughput_gbps * 1e9);
  r.t_baseline = r.t_io_ref + std::max(r.t_io_all_reads, t_rm_all);
  r.speedup = r.t_total > 0 ? r.t_baseline / r.t_total : 1.0;

  r.dm_saving_ratio = dm_saving(
      DmInputs{r.ref_bytes / 1e9, r.readset_bytes_raw / 1e9, r.ratio_filter});

  Timeline gs{r.t_total, r.t_rm_unfiltered, (r.ref_bytes + r.forwarded_bytes_raw) / ssd.external_bw_bytes_per_s(),
              r.t_filter_internal};
  r.energy_j = energy_estimate(gs, power, ssd.channels, true);
  Timeline base{r.t_baseline, t_rm_all,
                (r.ref_bytes + r.readset_bytes_raw) / ssd.external_bw_bytes_per_s(), 0.0};
  r.baseline_energy_j = energy_estimate(base, power, ssd.channels, false);
  r.energy_ratio = r.energy_j > 0 ? r.baseline_energy_j / r.energy_j : 1.0;
}

namespace {

struct SetSizes {
  double raw = 0;
  double encoded = 0;
};

SetSizes readset_sizes(const seqio::ReadSet& reads) {
  SetSizes s;
  for (const auto& r : reads.reads) {
    s.raw += double(r.len());
    s.encoded += double((r.len() + 3) / 4);
  }
  return s;
}

void echo_ssd_params(PipelineReport& r) {
  auto plan = ssdmodel::batch_plan(r.ssd);
  r.params.emplace_back("batch_bytes", std::to_string(plan.batch_bytes));
  r.params.emplace_back("buffer_bytes", std::to_string(plan.buffer_bytes));
}

}  // namespace

EmRunResult run_em_pipeline(const seqio::ReadSet& reads, const index::SRTable& srtable,
                            const index::SKIndex& skindex, const ssdmodel::SsdConfig& ssd,
                            const HostMapperModel& host, const RunOptions& opts) {
  EmRunResult res;
  PipelineReport& r = res.report;
  r.mode = "em";
  r.ssd = ssd;
  r.host = host;

  res.forwarded.assign(reads.size(), 0);
  for (const auto& rd : reads.reads)
    if (rd.has_ambiguous) {
      res.bypass_ids.push_back(rd.id);
      res.forwarded[rd.id] = 1;
    }

  emfilter::EmOptions eopts;
  eopts.emit_locations = opts.emit_locations;
  eopts.threads = opts.threads;
  auto filt = emfilter::em_filter(srtable, skindex, eopts);
  res.decisions = std::move(filt.decisions);
  for (const auto& d : res.decisions)
    if (d.verdict == emfilter::EmVerdict::Forward) res.forwarded[d.read_id] = 1;

  r.reads_total = reads.size();
  r.reads_filtered = filt.stats.reads_filtered;
  r.reads_forwarded = filt.stats.reads_forwarded + res.bypass_ids.size();
  r.comparator_steps = filt.stats.comparator_steps;
  r.ratio_filter = r.reads_total ? double(r.reads_filtered) / double(r.reads_total) : 0.0;

  auto sizes = readset_sizes(reads);
  r.readset_bytes_raw = sizes.raw;
  r.readset_bytes_encoded = sizes.encoded;
  for (const auto& rd : reads.reads)
    if (res.forwarded[rd.id]) r.forwarded_bytes_raw += double(rd.len());
  r.ref_bytes = opts.ref_raw_bytes;
  r.internal_filter_bytes =
      double(index::serialized_size(srtable)) + double(index::serialized_size(skindex));

  r.params.emplace_back("read_len", std::to_string(srtable.read_len));
  r.params.emplace_back("canonical_em", srtable.canonical ? "true" : "false");
  r.params.emplace_back("threads", std::to_string(opts.threads));
  echo_ssd_params(r);

  finish_report(r, opts.power, opts.event_mode);
  return res;
}

NmRunResult run_nm_pipeline(const seqio::ReadSet& reads, const index::KmerIndex& kindex,
                            const nmfilter::NmParams& params,
                            const ssdmodel::SsdConfig& ssd, const HostMapperModel& host,
                            const RunOptions& opts) {
  uint64_t resident = kindex.resident_bytes();
  if (resident > ssd.dram_bytes())
    throw CapacityError("KmerIndex needs " + std::to_string(resident) +
                        " bytes but modeled SSD DRAM is " +
                        std::to_string(ssd.dram_bytes()) + " bytes");

  NmRunResult res;
  PipelineReport& r = res.report;
  r.mode = "nm";
  r.ssd = ssd;
  r.host = host;

  res.decisions = nmfilter::nm_filter_all(reads, kindex, params, opts.threads);
  res.forwarded.assign(reads.size(), 0);
  r.nm_verdict_histogram.assign(4, 0);
  for (const auto& d : res.decisions) {
    r.nm_verdict_histogram[uint8_t(d.verdict)]++;
    if (nmfilter::is_forward(d.verdict)) res.forwarded[d.read_id] = 1;
  }

  r.reads_total = reads.size();
  r.reads_forwarded = r.nm_verdict_histogram[2] + r.nm_verdict_histogram[3];
  r.reads_filtered = r.reads_total - r.reads_forwarded;
  r.ratio_filter = r.reads_total ? double(r.reads_filtered) / double(r.reads_total) : 0.0;

  auto sizes = readset_sizes(reads);
  r.readset_bytes_raw = sizes.raw;
  r.readset_bytes_encoded = sizes.encoded;
  for (const auto& rd : reads.reads)
    if (res.forwarded[rd.id]) r.forwarded_bytes_raw += double(rd.len());
  r.ref_bytes = opts.ref_raw_bytes;
  r.internal_filter_bytes = sizes.encoded;  // 2-bit read set streamed from flash

  r.params.emplace_back("k", std::to_string(params.k));
  r.params.emplace_back("w", std::to_string(params.w));
  r.params.emplace_back("M", std::to_string(params.M));
  r.params.emplace_back("N", std::to_string(params.N));
  r.params.emplace_back("h", std::to_string(params.h));
  r.params.emplace_back("min_chain_score", std::to_string(params.min_chain_score));
  r.params.emplace_back("max_gap", std::to_string(params.max_gap));
  r.params.emplace_back("max_locations", std::to_string(kindex.params.max_locations));
  r.params.emplace_back("kmer_index_resident_bytes", std::to_string(resident));
  r.params.emplace_back("threads", std::to_string(opts.threads));
  echo_ssd_params(r);

  finish_report(r, opts.power, opts.event_mode);
  return res;
}

PipelineReport run_analytic(const AnalyticOptions& in, const ssdmodel::SsdConfig& ssd,
                            const HostMapperModel& host) {
  if (in.mode != "em" && in.mode != "nm")
    throw std::invalid_argument("analytic mode must be em or nm");
  if (in.ratio_filter < 0 || in.ratio_filter > 1)
    throw std::invalid_argument("ratio must be in [0, 1]");
  PipelineReport r;
  r.mode = in.mode + "-analytic";
  r.ssd = ssd;
  r.host = host;
  r.ratio_filter = in.ratio_filter;
  r.ref_bytes = in.ref_gb * 1e9;
  r.readset_bytes_raw = in.readset_gb * 1e9;
  r.readset_bytes_encoded = r.readset_bytes_raw / 4.0;
  r.forwarded_bytes_raw = r.readset_bytes_raw * (1.0 - in.ratio_filter);
  double internal_gb = in.internal_gb;
  if (internal_gb < 0)
    internal_gb = in.mode == "em" ? 2.0 * in.readset_gb : in.readset_gb / 4.0;
  r.internal_filter_bytes = internal_gb * 1e9;

  r.params.emplace_back("analytic_ratio", std::to_string(in.ratio_filter));
  r.params.emplace_back("analytic_internal_gb", std::to_string(internal_gb));
  echo_ssd_params(r);

  finish_report(r, in.power, in.event_mode);
  return r;
}

std::string PipelineReport::to_json() const {
  using json = nlohmann::ordered_json;
  json j;
  j["schema_version"] = 1;
  j["mode"] = mode;
  j["baseline_definition"] =
      "reference + full read set over the external link, all reads mapped at "
      "host throughput, I/O overlapped with mapping";

  json ssd_j;
  ssd_j["name"] = ssd.name;
  ssd_j["channels"] = ssd.channels;
  ssd_j["dies_per_channel"] = ssd.dies_per_channel;
  ssd_j["planes_per_die"] = ssd.planes_per_die;
  ssd_j["page_kib"] = ssd.page_kib;
  ssd_j["channel_bw_gbps"] = ssd.channel_bw_gbps;
  ssd_j["internal_bw_gbps"] = ssd.channel_bw_gbps * ssd.channels;
  ssd_j["external_bw_gbps"] = ssd.external_bw_gbps;
  ssd_j["internal_external_ratio"] = ssd.internal_external_ratio();
  ssd_j["nand_read_us"] = ssd.nand_read_us;
  ssd_j["dram_gib"] = ssd.dram_gib;
  ssd_j["accel_flush_s"] = ssd.accel_flush_s;
  j["ssd"] = ssd_j;

  json presets_j;
  for (const auto& name : ssdmodel::preset_names())
    presets_j[name] = ssdmodel::preset(name).internal_external_ratio();
  j["preset_internal_external_ratios"] = presets_j;

  json host_j;
  host_j["kind"] = host_kind_name(host.kind);
  host_j["throughput_gbps"] = host.throughput_gbps;
  j["host"] = host_j;

  json counts;
  counts["reads_total"] = reads_total;
  counts["reads_filtered"] = reads_filtered;
  counts["reads_forwarded"] = reads_forwarded;
  counts["ratio_filter"] = ratio_filter;
  if (mode == "em") counts["comparator_steps"] = comparator_steps;
  if (!nm_verdict_histogram.empty()) {
    json h;
    h["filter_low_seeds"] = nm_verdict_histogram[0];
    h["filter_low_chain"] = nm_verdict_histogram[1];
    h["forward_many_seeds"] = nm_verdict_histogram[2];
    h["forward_chained"] = nm_verdict_histogram[3];
    counts["nm_verdicts"] = h;
  }
  j["counts"] = counts;

  json bytes;
  bytes["ref"] = ref_bytes;
  bytes["readset_raw"] = readset_bytes_raw;
  bytes["readset_encoded"] = readset_bytes_encoded;
  bytes["forwarded_raw"] = forwarded_bytes_raw;
  bytes["internal_filter"] = internal_filter_bytes;
  bytes["external_total"] = bytes_external;
  j["bytes"] = bytes;

  json times;
  times["t_io_ref"] = t_io_ref;
  times["t_io_unfiltered"] = t_io_unfiltered;
  times["t_io_all_reads"] = t_io_all_reads;
  times["t_filter_internal"] = t_filter_internal;
  times["filter_bound"] = filter_bound;
  times["t_rm_unfiltered"] = t_rm_unfiltered;
  times["t_total"] = t_total;
  times["t_ideal_isf"] = t_ideal_isf_s;
  times["t_ideal_osf"] = t_ideal_osf_s;
  times["t_baseline"] = t_baseline;
  times["speedup"] = speedup;
  j["times"] = times;

  if (event_mode) {
    json ev;
    ev["t_filter_internal"] = event_mode->t_filter_internal;
    ev["batches"] = event_mode->batches;
    ev["flash_utilization"] = event_mode->flash_utilization;
    ev["compute_utilization"] = event_mode->compute_utilization;
    j["event_mode"] = ev;
  }

  j["dm_saving"] = dm_saving_ratio;

  json energy;
  energy["genstore_j"] = energy_j;
  energy["baseline_j"] = baseline_energy_j;
  energy["baseline_over_genstore"] = energy_ratio;
  energy["accel_power_mw"] = accel_power_mw(ssd.channels);
  j["energy"] = energy;

  json params_j;
  for (const auto& [k, v] : params) params_j[k] = v;
  j["params"] = params_j;

  return j.dump(2);
}

}  // namespace genstore::pipeline
