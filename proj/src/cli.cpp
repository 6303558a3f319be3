#include "f2ac/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "f2ac/bench.hpp"
#include "f2ac/dissociation.hpp"
#include "f2ac/energy.hpp"
#include "f2ac/f2n.hpp"
#include "f2ac/numeric.hpp"
#include "f2ac/permanent.hpp"
#include "f2ac/structure.hpp"
#include "f2ac/wht.hpp"

namespace f2ac::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Usage and input problems; exit status 2.
class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Collects input files while a command runs, so the report can record hashes.
class Inputs {
 public:
  explicit Inputs(const json* expected = nullptr) : expected_(expected) {}

  std::string text(const std::string& key, const std::string& path) {
    std::string bytes = read_bytes(path);
    const std::string hash = hex64(fnv1a(bytes));
    if (expected_ != nullptr) {
      if (!expected_->contains(key)) throw CliError("report has no input '" + key + "'");
      if ((*expected_)[key].value("fnv1a", "") != hash) {
        throw CliError("input '" + key + "' (" + path + ") differs from the recorded file");
      }
    }
    record_[key] = json{{"path", path}, {"fnv1a", hash}};
    return bytes;
  }

  Set set(const std::string& key, const std::string& path) {
    const std::string bytes = text(key, path);
    try {
      return parse_set(bytes);
    } catch (const ParseError& e) {
      throw CliError(path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw CliError(path + ": " + e.what());
    }
  }

  CombMatrix matrix(const std::string& key, const std::string& path) {
    std::istringstream in(text(key, path));
    try {
      return parse_matrix(in);
    } catch (const ParseError& e) {
      throw CliError(path + ": " + e.what());
    }
  }

  const json& record() const { return record_; }

 private:
  const json* expected_;
  json record_ = json::object();
};

struct Outcome {
  json result;
  int status = kHolds;
  std::optional<std::uint64_t> seed;  // effective seed when it comes from an input file
};

struct Context {
  Inputs& inputs;
  bool write_outputs = true;
};

// Integers that fit are JSON numbers; larger ones are decimal strings.
json big(const BigInt& v) {
  if (v >= 0 && v <= BigInt(std::numeric_limits<std::uint64_t>::max())) return v.convert_to<std::uint64_t>();
  if (v < 0 && v >= BigInt(std::numeric_limits<std::int64_t>::min())) return v.convert_to<std::int64_t>();
  return v.str();
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

json bits(const Set& s) {
  json a = json::array();
  for (Word w : s) a.push_back(to_bitstring(w, s.dim()));
  return a;
}

json bits(const std::vector<Word>& ws, int dim) {
  json a = json::array();
  for (Word w : ws) a.push_back(to_bitstring(w, dim));
  return a;
}

Rational rational_param(const json& params, const char* key) {
  const json& v = params.at(key);
  if (!v.is_string()) throw CliError(std::string(key) + " must be a \"p/q\" string");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw CliError(std::string(key) + ": " + e.what());
  }
}

int status_of(Verdict v) {
  switch (v) {
    case Verdict::kHolds:
      return kHolds;
    case Verdict::kViolated:
      return kViolated;
    case Verdict::kUndecided:
      return kUndecided;
  }
  return kUndecided;
}

// Violated dominates undecided, which dominates holds.
int combine(int a, int b) {
  if (a == kViolated || b == kViolated) return kViolated;
  return std::max(a, b);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError("cannot write '" + path + "'");
  out << text;
}

// ---------------------------------------------------------------------------

Outcome cmd_energy(const json& params, Context& ctx) {
  const Set a = ctx.inputs.set("set", params.at("set"));
  const int k = params.at("k");
  const std::string method = params.at("method");
  if (k < 1) throw CliError("--k must be positive");
  Outcome o;
  json methods = json::object();
  std::optional<BigInt> value;
  bool agree = true;
  auto add = [&](std::string_view name, const BigInt& v) {
    methods[std::string(name)] = big(v);
    if (value && *value != v) agree = false;
    if (!value) value = v;
  };
  if (method == "all") {
    for (const EnergyReport& r : energy_all(a, k)) add(to_string(r.method), r.value);
  } else if (method == "brute") {
    add("brute", energy_bruteforce(a, k));
  } else if (method == "spectral") {
    add("spectral", energy_spectral(a, k));
  } else if (method == "conv") {
    add("conv", energy_convolution(a, k));
  } else {
    throw CliError("unknown --method '" + method + "'");
  }
  o.result = {{"k", k}, {"size", a.size()}, {"value", big(*value)}, {"methods", methods}, {"agree", agree}};
  o.status = agree ? kHolds : kViolated;
  return o;
}

Outcome cmd_spectrum(const json& params, Context& ctx) {
  const Set a = ctx.inputs.set("set", params.at("set"));
  const SpectrumTable s = spectrum_of_set(a);
  BigInt sum_sq = 0;
  for (const BigInt& v : s) sum_sq += v * v;
  const bool parseval = sum_sq == BigInt(a.size()) * BigInt(s.size());
  std::ostringstream csv;
  write_spectrum_csv(csv, s);
  Outcome o;
  o.result = {{"n", a.dim()}, {"size", a.size()}, {"parseval", parseval}, {"csv_fnv1a", hex64(fnv1a(csv.str()))}};
  if (!params.at("alpha").is_null()) {
    const Rational alpha = rational_param(params, "alpha");
    if (alpha <= 0 || alpha > 1) throw CliError("--alpha must lie in (0, 1]");
    const Set large = large_spectrum(spectrum_words(a), alpha);
    o.result["alpha"] = to_string(alpha);
    o.result["large_spectrum_size"] = large.size();
    o.result["large_spectrum"] = bits(large);
  }
  if (ctx.write_outputs && !params.at("csv").is_null()) write_text(params.at("csv"), csv.str());
  o.status = parseval ? kHolds : kViolated;
  return o;
}

Outcome cmd_dissociate(const json& params, Context& ctx) {
  const Set l = ctx.inputs.set("check", params.at("check"));
  const int k = params.at("k");
  FamilySpec spec = FamilySpec::plain(l.dim(), k);
  if (!params.at("R").is_null()) {
    spec.r = ctx.inputs.set("R", params.at("R"));
    if (spec.r.dim() != l.dim()) throw CliError("R and the checked set differ in dimension");
  }
  spec.validate(l.dim());
  const std::uint64_t budget = params.at("budget");
  const FamilyStatus st = in_family(l, spec, budget);
  Outcome o;
  o.result = {{"size", l.size()}, {"k", k}, {"r_size", spec.r.size()}, {"status", to_string(st)}};
  o.status = st == FamilyStatus::kTrue ? kHolds : st == FamilyStatus::kFalse ? kViolated : kUndecided;
  return o;
}

CombMatrix oriented(const CombMatrix& h, bool& transposed) {
  transposed = h.rows() > h.cols();
  return transposed ? CombMatrix(h.transpose()) : h;
}

Outcome cmd_permanent(const json& params, Context& ctx) {
  bool transposed = false;
  const CombMatrix h = oriented(ctx.inputs.matrix("matrix", params.at("matrix")), transposed);
  Outcome o;
  o.result = {{"rows", h.rows()}, {"cols", h.cols()}, {"transposed", transposed}, {"permanent", big(permanent(h))}};
  return o;
}

Outcome cmd_fk(const json& params, Context& ctx) {
  bool transposed = false;
  const CombMatrix h = oriented(ctx.inputs.matrix("matrix", params.at("matrix")), transposed);
  const FkResult fk = fk_zero_test(h);
  const bool valid = verify_fk(h, fk);
  Outcome o;
  json cert = json::object();
  if (fk.zero) {
    cert = {{"zero_rows", fk.zero_rows}, {"zero_cols", fk.zero_cols}};
  } else {
    json diag = json::array();
    for (auto [i, j] : fk.diagonal) diag.push_back({i, j});
    cert = {{"diagonal", diag}};
  }
  o.result = {{"rows", h.rows()}, {"cols", h.cols()}, {"transposed", transposed}, {"zero", fk.zero},
              {"certificate", cert}, {"certificate_valid", valid}};
  bool agree = true;
  try {
    const BigInt per = permanent(h);
    agree = (per == 0) == fk.zero;
    o.result["permanent"] = big(per);
    o.result["agree"] = agree;
  } catch (const BudgetExceeded&) {
    o.result["permanent"] = nullptr;
  }
  o.status = valid && agree ? kHolds : kViolated;
  return o;
}

Outcome cmd_lemma_per0(const json& params, Context& ctx) {
  Outcome o;
  if (!params.at("exhaustive").is_null()) {
    const int p = params.at("exhaustive").at(0);
    const int r = params.at("exhaustive").at(1);
    if (p < 1 || r < 1 || p * r > 16) throw CliError("--exhaustive needs p, r >= 1 and p r <= 16");
    const ExhaustiveSummary s = lemma_per0_exhaustive(p, r);
    o.result = {{"p", s.p}, {"r", s.r}, {"examined", s.examined}, {"satisfying", s.satisfying},
                {"falsified", s.falsified}, {"oracle_mismatches", s.oracle_mismatches}};
    o.status = s.falsified == 0 && s.oracle_mismatches == 0 ? kHolds : kViolated;
    return o;
  }
  if (params.at("matrix").is_null()) throw CliError("lemma-per0 needs --exhaustive p r or --matrix file");
  const CombMatrix h = ctx.inputs.matrix("matrix", params.at("matrix"));
  const ReducedPermanentReport r = reduced_permanent_check(h);
  o.result = {{"rows_ok", r.rows_ok}, {"cols_ok", r.cols_ok}, {"total_ok", r.total_ok},
              {"hypotheses_hold", r.hypotheses_hold}, {"kept_columns", r.kept_columns}};
  if (r.per_h0_positive) {
    o.result["per_h0_positive"] = *r.per_h0_positive;
    o.status = *r.per_h0_positive ? kHolds : kViolated;
  } else {
    o.result["per_h0_positive"] = nullptr;
    o.status = kUndecided;
  }
  return o;
}

json report_json(const BoundReport& r) {
  json extra = json::object();
  for (const auto& [k, v] : r.extra) extra[k] = v;
  return {{"instance", r.instance},
          {"lhs", to_string(r.lhs)},
          {"rhs", rhs_text(r.rhs)},
          {"holds", to_string(r.verdict)},
          {"slack", fmt_double(r.slack)},
          {"failed_preconditions", r.failed_preconditions},
          {"extra", extra}};
}

SweepConfig parse_sweep(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CliError(std::string("sweep config: ") + e.what());
  }
  if (!j.is_object()) throw CliError("sweep config must be a JSON object");
  SweepConfig cfg;
  for (const auto& [key, v] : j.items()) {
    if (key == "seed") {
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "instances") {
      cfg.instances = v.get<int>();
    } else if (key == "n_min") {
      cfg.n_min = v.get<int>();
    } else if (key == "n_max") {
      cfg.n_max = v.get<int>();
    } else if (key == "lambda_max") {
      cfg.lambda_max = v.get<int>();
    } else if (key == "p_values") {
      cfg.p_values = v.get<std::vector<int>>();
    } else if (key == "d_values") {
      cfg.d_values = v.get<std::vector<int>>();
    } else if (key == "k_values") {
      cfg.k_values = v.get<std::vector<int>>();
    } else if (key == "n") {
      cfg.n = v.get<int>();
    } else if (key == "delta") {
      if (!v.is_string()) throw CliError("sweep config: delta must be a \"p/q\" string");
      cfg.delta = parse_rational(v.get<std::string>());
    } else {
      throw CliError("sweep config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

Outcome cmd_bench(const json& params, Context& ctx) {
  const std::string theorem = params.at("theorem");
  std::vector<BoundReport> rows;
  Outcome o;
  const bool majority_direct = theorem == "majority" && params.at("sweep").is_null() && !params.at("n").is_null();
  if (majority_direct) {
    if (params.at("delta").is_null()) throw CliError("bench --theorem majority needs --delta");
    const MajorityInstance inst = build_majority(params.at("n"), rational_param(params, "delta"));
    int d_lo = 1;
    int d_hi = inst.k + 1;
    if (!params.at("d").is_null()) d_lo = d_hi = params.at("d");
    json checks = json::array();
    for (int d = d_lo; d <= d_hi; ++d) {
      const MajorityReport rep = verify_majority(inst, d);
      rows.push_back(rep.intersection);
      rows.push_back(rep.proposition);
      checks.push_back({{"d", d},
                        {"coefficient", big(rep.coefficient)},
                        {"coefficient_matches", rep.coefficient_matches},
                        {"size_bounds", rep.size_bounds},
                        {"density_bounds", rep.density_bounds},
                        {"shift_invariance", rep.shift_invariance},
                        {"h1_in_spectrum", rep.h1_in_spectrum},
                        {"spectrum_size", rep.spectrum_size},
                        {"spectrum_lower", rep.spectrum_lower},
                        {"spectrum_equals_h", rep.spectrum_equals_h}});
    }
    o.result["majority"] = {{"n", inst.n}, {"delta", to_string(inst.delta)}, {"k", inst.k}, {"nprime", inst.nprime},
                            {"size", inst.a.size()}, {"c", to_string(inst.c)},
                            {"constant_rederived", inst.constant_rederived}, {"checks", checks}};
    for (const json& c : checks) {
      for (const char* key : {"coefficient_matches", "size_bounds", "density_bounds", "shift_invariance",
                              "h1_in_spectrum", "spectrum_lower"}) {
        if (!c.at(key).get<bool>()) o.status = kViolated;
      }
    }
  } else {
    SweepConfig cfg;
    if (!params.at("sweep").is_null()) cfg = parse_sweep(ctx.inputs.text("sweep", params.at("sweep")));
    if (!params.at("seed").is_null()) cfg.seed = params.at("seed");
    if (!params.at("instances").is_null()) cfg.instances = params.at("instances");
    if (!params.at("n").is_null()) cfg.n = params.at("n").get<int>();
    if (!params.at("delta").is_null()) cfg.delta = rational_param(params, "delta");
    rows = run_sweep(theorem, cfg);
    o.seed = cfg.seed;
    o.result["instances"] = cfg.instances;
  }
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  std::map<std::string, int> counts{{"holds", 0}, {"violated", 0}, {"undecided", 0}};
  json out_rows = json::array();
  for (const BoundReport& r : rows) {
    ++counts[std::string(to_string(r.verdict))];
    o.status = combine(o.status, status_of(r.verdict));
    out_rows.push_back(report_json(r));
  }
  o.result["theorem"] = theorem;
  o.result["counts"] = counts;
  o.result["csv_fnv1a"] = hex64(fnv1a(csv.str()));
  o.result["rows"] = out_rows;
  if (ctx.write_outputs && !params.at("out").is_null()) write_text(params.at("out"), csv.str());
  return o;
}

// Parameter overrides for extraction, read from a JSON object.
InverseParams inverse_params(const json& j, int p, std::uint64_t seed) {
  InverseParams ip;
  ip.p = p;
  ip.seed = seed;
  ip.connect.seed = seed;
  auto rat = [](const json& v, const std::string& key) {
    if (!v.is_string()) throw CliError("params." + key + " must be a \"p/q\" string");
    return parse_rational(v.get<std::string>());
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "k") ip.k = rat(v, key);
    else if (key == "eta") ip.eta = rat(v, key);
    else if (key == "epsilon") ip.epsilon = rat(v, key);
    else if (key == "zeta") ip.zeta = rat(v, key);
    else if (key == "w") ip.w = v.get<int>();
    else if (key == "t") ip.t = v.get<int>();
    else if (key == "rounds") ip.rounds = v.get<int>();
    else if (key == "split_trials") ip.split_trials = v.get<int>();
    else if (key == "candidates_per_pivot") ip.candidates_per_pivot = v.get<int>();
    else if (key == "min_side") ip.min_side = v.get<int>();
    else if (key == "restarts") ip.restarts = v.get<int>();
    else if (key == "lookahead") ip.lookahead = v.get<bool>();
    else if (key == "connect") {
      for (const auto& [ck, cv] : v.items()) {
        if (ck == "k") ip.connect.k = cv.get<int>();
        else if (ck == "beta1") ip.connect.beta1 = rat(cv, ck);
        else if (ck == "beta2") ip.connect.beta2 = rat(cv, ck);
        else if (ck == "c") ip.connect.c = rat(cv, ck);
        else if (ck == "search_budget") ip.connect.search_budget = cv.get<std::uint64_t>();
        else if (ck == "exhaustive_limit") ip.connect.exhaustive_limit = cv.get<int>();
        else throw CliError("params.connect: unknown key '" + ck + "'");
      }
    } else {
      throw CliError("params: unknown key '" + key + "'");
    }
  }
  ip.validate();
  return ip;
}

json opt_rational(const std::optional<Rational>& r) { return r ? json(to_string(*r)) : json(nullptr); }
json opt_int(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }

json params_json(const InverseParams& ip) {
  return {{"p", ip.p}, {"k", to_string(ip.k)}, {"eta", to_string(ip.eta)}, {"epsilon", opt_rational(ip.epsilon)},
          {"zeta", opt_rational(ip.zeta)}, {"w", opt_int(ip.w)}, {"t", opt_int(ip.t)}, {"rounds", ip.rounds},
          {"split_trials", ip.split_trials}, {"candidates_per_pivot", ip.candidates_per_pivot},
          {"min_side", ip.min_side}, {"restarts", ip.restarts}, {"lookahead", ip.lookahead},
          {"connect", {{"k", ip.connect.k}, {"beta1", to_string(ip.connect.beta1)},
                       {"beta2", to_string(ip.connect.beta2)}, {"c", to_string(ip.connect.c)},
                       {"search_budget", ip.connect.search_budget},
                       {"exhaustive_limit", ip.connect.exhaustive_limit}}},
          {"seed", ip.seed}};
}

json rect_json(const Rectangle& r, int dim) {
  return {{"prefix", bits(r.prefix, dim)}, {"l", bits(r.l)}, {"lp", bits(r.lp)}, {"sum_size", r.sum_set().size()}};
}

json round_json(const ExtractionRound& r, int dim) {
  json j = {{"working_size", r.working_size}, {"refined_size", r.refined_size},
            {"refine_status", to_string(r.refine_status)}, {"refine_steps", r.refine_steps},
            {"cross_mass", r.cross_mass}, {"split_guarantee", r.split_guarantee}, {"q3_size", r.q3_size},
            {"s1", r.s1}, {"s2", r.s2}, {"bucket_sizes", r.bucket_sizes}, {"epsilon", to_string(r.epsilon)},
            {"zeta", to_string(r.zeta)}, {"w", r.w}, {"t", r.t}, {"epsilon_condition", r.epsilon_condition},
            {"pivot", r.pivot}, {"supports", r.supports}, {"greedy_selected", r.greedy_selected},
            {"seed_l", r.seed_l}, {"seed_lp", r.seed_lp}, {"note", r.note}};
  j["emitted"] = r.emitted ? rect_json(*r.emitted, dim) : json(nullptr);
  return j;
}

json extraction_json(const ExtractionResult& r, int dim) {
  json rects = json::array();
  for (const Rectangle& rect : r.rectangles) rects.push_back(rect_json(rect, dim));
  json trace = json::array();
  for (const ExtractionRound& round : r.trace) trace.push_back(round_json(round, dim));
  return {{"rectangles", rects}, {"coverage", r.coverage}, {"covered", r.covered},
          {"family", to_string(r.family)}, {"containment_ok", r.containment_ok},
          {"disjointness_ok", r.disjointness_ok}, {"warnings", r.warnings}, {"trace", trace}};
}

Outcome cmd_extract(const json& params, Context& ctx) {
  const Set q = ctx.inputs.set("q", params.at("q"));
  const Set lambda = ctx.inputs.set("lambda", params.at("lambda"));
  if (q.dim() != lambda.dim()) throw CliError("Q and Lambda differ in dimension");
  const int d = params.at("d");
  json overrides = json::object();
  if (!params.at("params").is_null()) {
    const std::string spec = params.at("params");
    const std::string text = !spec.empty() && spec.front() == '{' ? spec : ctx.inputs.text("params", spec);
    try {
      overrides = json::parse(text);
    } catch (const json::parse_error& e) {
      throw CliError(std::string("--params: ") + e.what());
    }
  }
  const InverseParams ip = inverse_params(overrides, params.at("p"), params.at("seed"));
  Outcome o;
  bool ok = true;
  FamilyStatus family = FamilyStatus::kUndecided;
  if (d == 2) {
    const ExtractionResult r = extract_rectangles_pair(q, lambda, ip);
    o.result = extraction_json(r, q.dim());
    ok = r.containment_ok && r.disjointness_ok;
    family = r.family;
  } else if (d > 2) {
    const DExtractionResult r = extract_rectangles_d(q, lambda, d, ip);
    json parts = json::array();
    for (const Set& s : r.parts) parts.push_back(bits(s));
    o.result = {{"rectangle", r.rectangle ? rect_json(*r.rectangle, q.dim()) : json(nullptr)},
                {"parts", parts}, {"partition_mass", r.partition_mass}, {"prefix_mass", r.prefix_mass},
                {"family", to_string(r.family)}, {"containment_ok", r.containment_ok}, {"warnings", r.warnings}};
    o.result["pair"] = r.pair ? extraction_json(*r.pair, q.dim()) : json(nullptr);
    ok = r.containment_ok && (!r.pair || r.pair->disjointness_ok);
    family = r.family;
  } else {
    throw CliError("--d must be at least 2");
  }
  o.result["params"] = params_json(ip);
  o.status = !ok ? kViolated : family == FamilyStatus::kTrue ? kHolds : kUndecided;
  return o;
}

Outcome cmd_plant(const json& params, Context& ctx) {
  PlantParams pp;
  pp.n = params.at("n");
  pp.lambda_size = params.at("lambda_size");
  pp.h = params.at("h");
  pp.lsize = params.at("lsize");
  pp.lpsize = params.at("lpsize");
  pp.noise = rational_param(params, "noise");
  pp.seed = params.at("seed");
  const PlantedInstance inst = plant_instance(pp);
  json rects = json::array();
  for (const Rectangle& r : inst.planted) rects.push_back(rect_json(r, pp.n));
  Outcome o;
  o.result = {{"lambda", bits(inst.lambda)}, {"q_size", inst.q.size()}, {"q", bits(inst.q)},
              {"planted", rects}, {"planted_mass", inst.planted_union.size()}, {"noise", bits(inst.noise)}};
  if (ctx.write_outputs) {
    if (!params.at("out_q").is_null()) write_text(params.at("out_q"), serialize_set(inst.q));
    if (!params.at("out_lambda").is_null()) write_text(params.at("out_lambda"), serialize_set(inst.lambda));
  }
  return o;
}

using Command = std::function<Outcome(const json&, Context&)>;

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"energy", cmd_energy},       {"spectrum", cmd_spectrum}, {"dissociate", cmd_dissociate},
      {"permanent", cmd_permanent}, {"fk-test", cmd_fk},        {"lemma-per0", cmd_lemma_per0},
      {"bench", cmd_bench},         {"extract", cmd_extract},   {"plant", cmd_plant}};
  return table;
}

// Runs a command and assembles the report.
std::pair<json, int> execute(const std::string& command, const json& params, std::uint64_t seed,
                             const json* expected_inputs, bool write_outputs) {
  const auto it = commands().find(command);
  if (it == commands().end()) throw CliError("unknown command '" + command + "'");
  Inputs inputs(expected_inputs);
  Context ctx{inputs, write_outputs};
  const auto start = std::chrono::steady_clock::now();
  Outcome o = it->second(params, ctx);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json report = {{"command", command},
                 {"config", {{"seed", o.seed.value_or(seed)}, {"params", params}, {"inputs", inputs.record()}}},
                 {"result", o.result},
                 {"exit_status", o.status},
                 {"timing", {{"seconds", seconds}}}};
  return {report, o.status};
}

std::string first_difference(const json& a, const json& b, const std::string& path) {
  if (a.is_number() && b.is_number()) return a == b ? "" : path;
  if (a.type() != b.type()) return path;
  if (a.is_object()) {
    for (const auto& [k, v] : a.items()) {
      if (!b.contains(k)) return path + "/" + k;
      const std::string d = first_difference(v, b.at(k), path + "/" + k);
      if (!d.empty()) return d;
    }
    return a.size() == b.size() ? "" : path;
  }
  if (a.is_array()) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      const std::string d = first_difference(a[i], b[i], path + "/" + std::to_string(i));
      if (!d.empty()) return d;
    }
    return a.size() == b.size() ? "" : path;
  }
  return a == b ? "" : path;
}

int replay(const std::string& report_path, std::ostream& out) {
  json report;
  try {
    report = json::parse(read_bytes(report_path));
  } catch (const json::parse_error& e) {
    throw CliError(report_path + ": " + e.what());
  }
  if (!report.contains("config") || !report["config"].is_object()) throw CliError("report has no config");
  const json& config = report["config"];
  if (!config.contains("seed") || !config["seed"].is_number_unsigned()) throw CliError("report has no seed");
  if (!config.contains("params") || !report.contains("command") || !report.contains("result")) {
    throw CliError("report lacks command, params or result");
  }
  const json inputs = config.value("inputs", json::object());
  const auto [fresh, status] =
      execute(report["command"], config["params"], config["seed"], &inputs, /*write_outputs=*/false);
  const std::string recorded = report["result"].dump();
  const std::string replayed = fresh["result"].dump();
  const bool match = recorded == replayed;
  json r = {{"command", report["command"]}, {"match", match}, {"bytes", recorded.size()}};
  if (!match) r["first_difference"] = first_difference(report["result"], fresh["result"], "/result");
  out << r.dump(2) << '\n';
  (void)status;
  return match ? kHolds : kViolated;
}

// ---------------------------------------------------------------------------
// Argument parsing

json opt(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<std::uint64_t>& v) { return v ? json(*v) : json(nullptr); }

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }
json opt_path(const std::optional<std::string>& v) { return v ? json(absolute(*v)) : json(nullptr); }

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact tools for additive structure in F_2^n", "f2ac"};
  app.require_subcommand(1);
  std::optional<std::string> report_path;

  std::string command;
  json params;
  std::uint64_t seed = 0;
  std::function<void()> finalize;

  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--report", report_path, "Write the JSON report here instead of stdout");
    return s;
  };

  std::string set_file;
  int k = 2;
  std::string method = "all";
  auto* energy = sub("energy", "Additive energy T_k of a set");
  energy->add_option("--set", set_file, "Set file")->required();
  energy->add_option("--k", k, "Energy order")->required();
  energy->add_option("--method", method, "brute, spectral, conv or all")
      ->check(CLI::IsMember({"brute", "spectral", "conv", "all"}));
  energy->callback([&] {
    params = {{"set", absolute(set_file)}, {"k", k}, {"method", method}};
  });

  std::optional<std::string> alpha;
  std::optional<std::string> csv;
  auto* spectrum = sub("spectrum", "Walsh-Hadamard spectrum of a set");
  spectrum->add_option("--set", set_file, "Set file")->required();
  spectrum->add_option("--alpha", alpha, "Large-spectrum threshold p/q");
  spectrum->add_option("--csv", csv, "Write r,coefficient CSV here");
  spectrum->callback([&] { params = {{"set", absolute(set_file)}, {"alpha", opt(alpha)}, {"csv", opt_path(csv)}}; });

  std::optional<std::string> r_file;
  std::uint64_t budget = kFamilyBudget;
  auto* dissociate = sub("dissociate", "Membership in Lambda_R(k)");
  dissociate->add_option("--check", set_file, "Set file")->required();
  dissociate->add_option("--k", k, "Subset size bound")->required();
  dissociate->add_option("--R", r_file, "Set file for R (default {0})");
  dissociate->add_option("--budget", budget, "Enumeration budget");
  dissociate->callback([&] {
    params = {{"check", absolute(set_file)}, {"k", k}, {"R", opt_path(r_file)}, {"budget", budget}};
  });

  std::string matrix_file;
  auto* perm = sub("permanent", "Permanent of a nonnegative integer matrix");
  perm->add_option("--matrix", matrix_file, "Matrix file")->required();
  perm->callback([&] { params = {{"matrix", absolute(matrix_file)}}; });

  auto* fk = sub("fk-test", "Zero-permanent test with certificate");
  fk->add_option("--matrix", matrix_file, "Matrix file")->required();
  fk->callback([&] { params = {{"matrix", absolute(matrix_file)}}; });

  std::vector<int> exhaustive;
  std::optional<std::string> lemma_matrix;
  auto* lemma = sub("lemma-per0", "Reduced-permanent positivity check");
  lemma->add_option("--exhaustive", exhaustive, "p r: all p x r matrices over {0,1,2}")->expected(2);
  lemma->add_option("--matrix", lemma_matrix, "Matrix file");
  lemma->callback([&] {
    params = {{"exhaustive", exhaustive.empty() ? json(nullptr) : json(exhaustive)},
              {"matrix", opt_path(lemma_matrix)}};
  });

  std::string theorem;
  std::optional<std::string> sweep_file;
  std::optional<std::string> out_file;
  std::optional<int> bench_n;
  std::optional<int> bench_d;
  std::optional<int> instances;
  std::optional<std::string> delta;
  std::optional<std::uint64_t> bench_seed;
  auto* bench = sub("bench", "Instance-level inequality checks");
  std::vector<std::string> ids;
  for (auto id : sweep_theorems()) ids.emplace_back(id);
  bench->add_option("--theorem", theorem, "Theorem id")->required()->check(CLI::IsMember(ids));
  bench->add_option("--sweep", sweep_file, "Sweep config (JSON)");
  bench->add_option("--out", out_file, "CSV output");
  bench->add_option("--n", bench_n, "Dimension (majority)");
  bench->add_option("--delta", delta, "Density p/q (majority)");
  bench->add_option("--d", bench_d, "Single d (majority)");
  bench->add_option("--instances", instances, "Instance count");
  bench->add_option("--seed", bench_seed, "Sweep seed");
  bench->callback([&] {
    params = {{"theorem", theorem}, {"sweep", opt_path(sweep_file)}, {"out", opt_path(out_file)},
              {"n", opt(bench_n)}, {"delta", opt(delta)}, {"d", opt(bench_d)}, {"instances", opt(instances)},
              {"seed", opt(bench_seed)}};
    if (bench_seed) seed = *bench_seed;
  });

  std::string q_file;
  std::string lambda_file;
  int d = 2;
  int p = 4;
  std::uint64_t extract_seed = 0;
  std::optional<std::string> extract_params;
  auto* extract = sub("extract", "Rectangle extraction from Q inside dLambda");
  extract->add_option("--q", q_file, "Set file for Q")->required();
  extract->add_option("--lambda", lambda_file, "Set file for Lambda")->required();
  extract->add_option("--d", d, "Number of summands")->required();
  extract->add_option("--p", p, "Energy order")->required();
  extract->add_option("--seed", extract_seed, "Seed");
  extract->add_option("--params", extract_params, "JSON object or file with parameter overrides");
  extract->callback([&] {
    json pj = nullptr;
    if (extract_params) {
      pj = !extract_params->empty() && extract_params->front() == '{' ? json(*extract_params)
                                                                      : json(absolute(*extract_params));
    }
    params = {{"q", absolute(q_file)}, {"lambda", absolute(lambda_file)}, {"d", d}, {"p", p},
              {"seed", extract_seed}, {"params", pj}};
    seed = extract_seed;
  });

  PlantParams pp;
  std::string noise = "0";
  std::optional<std::string> out_q;
  std::optional<std::string> out_lambda;
  auto* plant = sub("plant", "Planted rectangle instance");
  plant->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  plant->add_option("--h", pp.h, "Rectangles")->required();
  plant->add_option("--lsize", pp.lsize, "|L|")->required();
  plant->add_option("--lpsize", pp.lpsize, "|L'|")->required();
  plant->add_option("--noise", noise, "Noise fraction p/q");
  plant->add_option("--seed", pp.seed, "Seed")->required();
  plant->add_option("--n", pp.n, "Dimension");
  plant->add_option("--lambda-size", pp.lambda_size, "|Lambda|");
  plant->add_option("--out-q", out_q, "Write Q here");
  plant->add_option("--out-lambda", out_lambda, "Write Lambda here");
  plant->callback([&] {
    params = {{"n", pp.n}, {"lambda_size", pp.lambda_size}, {"h", pp.h}, {"lsize", pp.lsize},
              {"lpsize", pp.lpsize}, {"noise", noise}, {"seed", pp.seed}, {"out_q", opt_path(out_q)},
              {"out_lambda", opt_path(out_lambda)}};
    seed = pp.seed;
  });

  std::string replay_file;
  auto* rep = app.add_subcommand("replay", "Re-run a report and compare its result");
  rep->add_option("report", replay_file, "Report file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kUndecided;
  }

  try {
    if (rep->parsed()) return replay(replay_file, out);
    for (CLI::App* s : app.get_subcommands()) command = s->get_name();
    const auto [report, status] = execute(command, params, seed, nullptr, true);
    const std::string text = report.dump(2) + "\n";
    if (report_path) {
      write_text(*report_path, text);
    } else {
      out << text;
    }
    return status;
  } catch (const CliError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const PreconditionError& e) {
    err << "precondition: " << e.what() << '\n';
  } catch (const BudgetExceeded& e) {
    err << "budget: " << e.what() << '\n';
  } catch (const GenerationFailed& e) {
    err << "generation: " << e.what() << '\n';
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kUndecided;
}

}  // namespace f2ac::cli
