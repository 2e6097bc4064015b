#include "spbp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "spbp/rng.hpp"

#ifndef SPBP_VERSION
#define SPBP_VERSION "0.0.0"
#endif

namespace spbp {

namespace {

using nlohmann::json;

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where("") + ": expected an object");
  }

  std::string where(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  int get_int(const std::string& key, int def, int min_value) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
    const auto x = v.get<long long>();
    if (x < min_value || x > 1'000'000'000LL) {
      throw ConfigError(where(key) + ": must be at least " + std::to_string(min_value));
    }
    return static_cast<int>(x);
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    throw ConfigError(where(key) + ": expected a non-negative integer");
  }

  double get_double(const std::string& key, double def, double lo, double hi) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + ": expected a number");
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi)) {
      std::ostringstream os;
      os << where(key) << ": must lie in [" << lo << ", " << hi << "]";
      throw ConfigError(os.str());
    }
    return x;
  }

  bool get_bool(const std::string& key, bool def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string get_string(const std::string& key, const std::string& def) {
    if (!has(key)) return def;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + ": expected a string");
    return v.get<std::string>();
  }

  template <typename F>
  auto parse_with(const std::string& key, const std::string& text, F&& fn) {
    try {
      return fn(text);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(where(it.key()) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.' || c == ':' || c == '+';
    if (!ok) return false;
  }
  return true;
}

Variant parse_variant(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  Variant v;
  v.selection = r.parse_with("selection", r.get_string("selection", "maxu"), parse_selection);
  v.bias = r.parse_with("bias", r.get_string("bias", "sp_rbar"), parse_bias);
  v.scheduler = r.parse_with("scheduler", r.get_string("scheduler", "lgs-mimo"), parse_scheduler);
  v.decouple = r.get_bool("decouple", false);
  if (r.has("antennas")) v.antennas = r.parse_with("antennas", r.get_string("antennas", ""), parse_antenna_mode);
  std::string def = std::string(to_string(v.selection)) + "-" + std::string(to_string(v.scheduler));
  if (v.decouple) def += "-decouple";
  v.name = r.get_string("name", def);
  if (!valid_name(v.name)) throw ConfigError(r.where("name") + ": use letters, digits and _-.:+ only");
  r.finish();
  return v;
}

ExperimentConfig parse_object(const json& root) {
  ObjectReader r(root, "");
  ExperimentConfig c;

  if (!r.has("sizes")) throw ConfigError("sizes: required");
  const auto& sizes = r.raw("sizes");
  if (!sizes.is_array() || sizes.empty()) throw ConfigError("sizes: expected a non-empty list of node counts");
  for (const auto& s : sizes) {
    if (!s.is_number_integer() || s.get<long long>() < 2 || s.get<long long>() > 100000) {
      throw ConfigError("sizes: every entry must be an integer >= 2");
    }
    c.sizes.push_back(s.get<int>());
  }
  c.instances_per_size = r.get_int("instances_per_size", c.instances_per_size, 1);
  c.realizations_per_instance = r.get_int("realizations_per_instance", c.realizations_per_instance, 1);
  c.T = r.get_int("T", c.T, 1);
  c.seed = r.get_u64("seed", c.seed);
  c.max_iterations = r.get_int("max_iterations", c.max_iterations, 1);
  c.output = r.get_string("output", c.output);
  c.jobs = r.get_int("jobs", c.jobs, 0);

  if (!r.has("variants")) throw ConfigError("variants: required");
  const auto& vs = r.raw("variants");
  if (!vs.is_array() || vs.empty()) throw ConfigError("variants: expected a non-empty list");
  std::set<std::string> names;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    c.variants.push_back(parse_variant(vs[i], "variants[" + std::to_string(i) + "]"));
    if (!names.insert(c.variants.back().name).second) {
      throw ConfigError("variants[" + std::to_string(i) + "].name: duplicate name '" + c.variants.back().name + "'");
    }
  }

  if (r.has("traffic")) {
    ObjectReader t(r.raw("traffic"), "traffic");
    auto& p = c.traffic;
    p.mix = t.get_double("mix", p.mix, 0.0, 1.0);
    if (t.has("lambda")) p.lambda = t.get_double("lambda", 0.0, 0.0, 1e6);
    p.flow_fraction = t.get_double("flow_fraction", p.flow_fraction, 0.0, 1.0);
    p.lambda_min = t.get_double("lambda_min", p.lambda_min, 0.0, 1e6);
    p.lambda_max = t.get_double("lambda_max", p.lambda_max, p.lambda_min, 1e6);
    p.burst_duration = t.get_int("burst_duration", p.burst_duration, 1);
    p.burst_margin = t.get_int("burst_margin", p.burst_margin, 0);
    t.finish();
  }
  if (r.has("radio")) {
    ObjectReader t(r.raw("radio"), "radio");
    c.generation.comm_radius = t.get_double("comm_radius", c.generation.comm_radius, 1e-9, 1e9);
    c.radio.interference_range = t.get_double("interference_range", c.radio.interference_range, 0.0, 1e9);
    c.radio.nullification = t.get_bool("nullification", c.radio.nullification);
    if (t.has("antennas")) {
      c.radio.antennas = t.parse_with("antennas", t.get_string("antennas", ""), parse_antenna_mode);
    }
    t.finish();
  }
  if (r.has("generation")) {
    ObjectReader t(r.raw("generation"), "generation");
    auto& g = c.generation;
    g.area_side = t.get_double("area_side", g.area_side, 0.0, 1e9);
    g.target_degree = t.get_double("target_degree", g.target_degree, 1e-9, 1e6);
    g.max_resamples = t.get_int("max_resamples", g.max_resamples, 0);
    g.max_radius_growth = t.get_int("max_radius_growth", g.max_radius_growth, 0);
    t.finish();
  }
  if (r.has("rates")) {
    ObjectReader t(r.raw("rates"), "rates");
    auto& p = c.rates;
    p.min_rate = t.get_double("min", p.min_rate, 1e-9, 1e9);
    p.max_rate = t.get_double("max", p.max_rate, p.min_rate, 1e9);
    p.realtime_stddev = t.get_double("realtime_stddev", p.realtime_stddev, 0.0, 1e9);
    p.realtime_half_width = t.get_double("realtime_half_width", p.realtime_half_width, 0.0, 1e9);
    t.finish();
  }
  if (r.has("debug")) {
    ObjectReader t(r.raw("debug"), "debug");
    auto& d = c.debug;
    d.check_feasibility = t.get_bool("check_feasibility", d.check_feasibility);
    d.check_dominance = t.get_bool("check_dominance", d.check_dominance);
    d.queue_dump = t.get_bool("queue_dump", d.queue_dump);
    d.trace = t.get_bool("trace", d.trace);
    t.finish();
  }
  r.finish();
  return c;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

std::string run_tag(const RunKey& k) {
  return "n" + std::to_string(k.size) + "_i" + std::to_string(k.instance) + "_r" + std::to_string(k.realization);
}

struct JobOutput {
  std::vector<RunResult> results;  // one per variant
  std::vector<FlowSpec> flows;
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (root.is_object() && root.contains("config") && root.contains("version")) return parse_object(root.at("config"));
  return parse_object(root);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_json(const ExperimentConfig& c) {
  json j;
  j["sizes"] = c.sizes;
  j["instances_per_size"] = c.instances_per_size;
  j["realizations_per_instance"] = c.realizations_per_instance;
  j["T"] = c.T;
  j["seed"] = c.seed;
  j["max_iterations"] = c.max_iterations;
  j["output"] = c.output;
  j["jobs"] = c.jobs;
  j["variants"] = json::array();
  for (const auto& v : c.variants) {
    json o;
    o["name"] = v.name;
    o["selection"] = std::string(to_string(v.selection));
    o["bias"] = std::string(to_string(v.bias));
    o["scheduler"] = std::string(to_string(v.scheduler));
    o["decouple"] = v.decouple;
    if (v.antennas) o["antennas"] = to_string(*v.antennas);
    j["variants"].push_back(o);
  }
  const auto& t = c.traffic;
  j["traffic"] = {{"mix", t.mix},
                  {"lambda", t.lambda ? json(*t.lambda) : json(nullptr)},
                  {"flow_fraction", t.flow_fraction},
                  {"lambda_min", t.lambda_min},
                  {"lambda_max", t.lambda_max},
                  {"burst_duration", t.burst_duration},
                  {"burst_margin", t.burst_margin}};
  j["radio"] = {{"comm_radius", c.generation.comm_radius},
                {"interference_range", c.radio.interference_range},
                {"nullification", c.radio.nullification},
                {"antennas", to_string(c.radio.antennas)}};
  j["generation"] = {{"area_side", c.generation.area_side},
                     {"target_degree", c.generation.target_degree},
                     {"max_resamples", c.generation.max_resamples},
                     {"max_radius_growth", c.generation.max_radius_growth}};
  j["rates"] = {{"min", c.rates.min_rate},
                {"max", c.rates.max_rate},
                {"realtime_stddev", c.rates.realtime_stddev},
                {"realtime_half_width", c.rates.realtime_half_width}};
  j["debug"] = {{"check_feasibility", c.debug.check_feasibility},
                {"check_dominance", c.debug.check_dominance},
                {"queue_dump", c.debug.queue_dump},
                {"trace", c.debug.trace}};
  return j.dump(2);
}

std::vector<RunKey> enumerate_runs(const ExperimentConfig& cfg) {
  std::vector<RunKey> keys;
  for (int size : cfg.sizes) {
    for (int i = 0; i < cfg.instances_per_size; ++i) {
      for (int r = 0; r < cfg.realizations_per_instance; ++r) {
        RunKey k;
        k.size = size;
        k.instance = i;
        k.realization = r;
        k.instance_seed = derive_seed({cfg.seed, static_cast<std::uint64_t>(size), static_cast<std::uint64_t>(i)});
        k.realization_seed = derive_seed({cfg.seed, static_cast<std::uint64_t>(size), static_cast<std::uint64_t>(i),
                                          static_cast<std::uint64_t>(r)});
        keys.push_back(k);
      }
    }
  }
  return keys;
}

ScenarioSpec scenario_spec(const ExperimentConfig& cfg, const RunKey& key) {
  ScenarioSpec s;
  s.nodes = key.size;
  s.instance_seed = key.instance_seed;
  s.realization_seed = key.realization_seed;
  s.T = cfg.T;
  s.generation = cfg.generation;
  s.rates = cfg.rates;
  s.traffic = cfg.traffic;
  s.radio = cfg.radio;
  s.max_iterations = cfg.max_iterations;
  return s;
}

void run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  namespace fs = std::filesystem;
  const fs::path out_dir(cfg.output);
  fs::create_directories(out_dir);
  if (cfg.debug.trace || cfg.debug.queue_dump) fs::create_directories(out_dir / "debug");
  fs::create_directories(out_dir / "failures");

  const auto keys = enumerate_runs(cfg);
  std::vector<JobOutput> outputs(keys.size());
  std::vector<std::exception_ptr> errors(keys.size());
  std::atomic<std::size_t> next{0};

  const auto work = [&] {
    for (std::size_t job = next++; job < keys.size(); job = next++) {
      try {
        const auto& key = keys[job];
        const Scenario sc = make_scenario(scenario_spec(cfg, key));
        outputs[job].flows = sc.flows;
        for (const auto& v : cfg.variants) {
          const std::string tag = run_tag(key) + "_" + v.name;
          RunOptions opt;
          opt.check_feasibility = cfg.debug.check_feasibility;
          opt.check_dominance = cfg.debug.check_dominance;
          opt.failure_trace_path = (out_dir / "failures" / (tag + ".jsonl")).string();
          std::ofstream trace_file;
          std::ofstream queue_file;
          if (cfg.debug.trace) {
            trace_file.open(out_dir / "debug" / (tag + ".trace.jsonl"));
            opt.trace = &trace_file;
          }
          if (cfg.debug.queue_dump) {
            queue_file.open(out_dir / "debug" / (tag + ".queues.csv"));
            opt.queue_dump = &queue_file;
          }
          outputs[job].results.push_back(run(sc, v, opt));
        }
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };

  unsigned jobs = cfg.jobs > 0 ? static_cast<unsigned>(cfg.jobs) : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(keys.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned n = 1; n < jobs; ++n) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::error_code ec;
  if (fs::is_empty(out_dir / "failures", ec)) fs::remove(out_dir / "failures", ec);

  std::ofstream flows_csv(out_dir / "flows.csv");
  flows_csv << "instance_id,seed,variant,scheduler,flow_src,flow_dst,kind,lambda,throughput,mean_latency,"
               "delivery_ratio,trip_length,composite_latency,network_size,realization,injected,delivered\n";
  std::ofstream agg_csv(out_dir / "aggregate.csv");
  agg_csv << "network_size,instance_id,realization,seed,variant,scheduler,traffic,flows";
  for (const char* m : {"throughput", "mean_latency", "delivery_ratio", "trip_length", "composite_latency"}) {
    agg_csv << ',' << m << "_mean," << m << "_p95";
  }
  agg_csv << '\n';

  for (std::size_t job = 0; job < keys.size(); ++job) {
    const auto& key = keys[job];
    const auto& out = outputs[job];
    for (std::size_t vi = 0; vi < cfg.variants.size(); ++vi) {
      const auto& v = cfg.variants[vi];
      const auto& res = out.results[vi];
      for (std::size_t f = 0; f < out.flows.size(); ++f) {
        const auto& spec = out.flows[f];
        const auto& m = res.flows[f];
        flows_csv << key.instance << ',' << key.realization_seed << ',' << v.name << ',' << to_string(v.scheduler)
                  << ',' << spec.src << ',' << spec.dst << ',' << to_string(spec.kind) << ',' << fmt(spec.rate) << ','
                  << fmt(m.throughput) << ',' << fmt(m.mean_latency) << ',' << fmt(m.delivery_ratio) << ','
                  << fmt(m.trip_length) << ',' << fmt(m.composite_latency) << ',' << key.size << ','
                  << key.realization << ',' << m.injected << ',' << m.delivered << '\n';
      }
      for (const auto& a : res.aggregates) {
        agg_csv << key.size << ',' << key.instance << ',' << key.realization << ',' << key.realization_seed << ','
                << v.name << ',' << to_string(v.scheduler) << ',' << a.traffic << ',' << a.flows;
        for (const auto* s : {&a.throughput, &a.mean_latency, &a.delivery_ratio, &a.trip_length,
                              &a.composite_latency}) {
          agg_csv << ',' << fmt(s->mean) << ',' << fmt(s->p95);
        }
        agg_csv << '\n';
      }
    }
  }

  json manifest;
  manifest["version"] = SPBP_VERSION;
  manifest["seed"] = cfg.seed;
  manifest["runs"] = keys.size();
  manifest["config"] = json::parse(config_json(cfg));
  // Execution settings stay out of the manifest.
  manifest["config"].erase("output");
  manifest["config"].erase("jobs");
  std::ofstream(out_dir / "manifest.json") << manifest.dump(2) << '\n';
  log << "wrote " << keys.size() * cfg.variants.size() << " runs to " << out_dir.string() << '\n';
}

void summarize(const std::filesystem::path& dir, std::ostream& os) {
  const auto path = dir / "aggregate.csv";
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing file '" + path.string() + "'");
  std::string line;
  std::vector<std::string> header;
  if (std::getline(in, line)) header = split(line);

  std::vector<std::size_t> metric_cols;
  std::size_t size_col = 0, variant_col = 0, traffic_col = 0;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto& h = header[i];
    if (h == "network_size") size_col = i;
    if (h == "variant") variant_col = i;
    if (h == "traffic") traffic_col = i;
    if (h.size() > 5 && h.compare(h.size() - 5, 5, "_mean") == 0) metric_cols.push_back(i);
  }

  struct Group {
    std::vector<std::vector<double>> values;
  };
  std::vector<std::string> order;
  std::map<std::string, Group> groups;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) throw std::runtime_error("malformed row in '" + path.string() + "'");
    const std::string key = cells[size_col] + '\t' + cells[variant_col] + '\t' + cells[traffic_col];
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) {
      order.push_back(key);
      it->second.values.resize(metric_cols.size());
    }
    for (std::size_t m = 0; m < metric_cols.size(); ++m) it->second.values[m].push_back(std::stod(cells[metric_cols[m]]));
  }

  const auto pad = [](std::string s, std::size_t w) {
    const auto width = static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
    s.append(width < w ? w - width : 1, ' ');
    return s;
  };
  std::string head = pad("size", 6) + pad("variant", 30) + pad("traffic", 11) + pad("runs", 6);
  for (auto c : metric_cols) head += pad(header[c].substr(0, header[c].size() - 5), 26);
  os << head << '\n';
  for (const auto& key : order) {
    const auto& g = groups.at(key);
    std::istringstream ks(key);
    std::string size, variant, traffic;
    std::getline(ks, size, '\t');
    std::getline(ks, variant, '\t');
    std::getline(ks, traffic, '\t');
    const std::size_t n = g.values.empty() ? 0 : g.values.front().size();
    std::string row = pad(size, 6) + pad(variant, 30) + pad(traffic, 11) + pad(std::to_string(n), 6);
    for (const auto& v : g.values) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      char buf[64];
      if (v.size() < 2) {
        std::snprintf(buf, sizeof buf, "%.4f ± —", mean);
      } else {
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
        std::snprintf(buf, sizeof buf, "%.4f ± %.4f", mean, 1.96 * sd / std::sqrt(static_cast<double>(v.size())));
      }
      row += pad(buf, 26);
    }
    os << row << '\n';
  }
}

}  // namespace spbp
