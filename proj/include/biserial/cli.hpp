#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "biserial/circular.hpp"
#include "biserial/components.hpp"
#include "biserial/endo.hpp"
#include "biserial/errors.hpp"
#include "biserial/quiver.hpp"
#include "biserial/quiver_io.hpp"
#include "biserial/rational.hpp"
#include "biserial/rep_io.hpp"
#include "biserial/representation.hpp"
#include "biserial/rng.hpp"
#include "biserial/stability.hpp"
#include "biserial/strings.hpp"

namespace biserial {

/// One invocation's worth of configuration. Identical configs produce
/// byte-identical reports; the seed is a fixed constant unless overridden.
struct JobConfig {
  std::string command;
  std::string input_path;
  std::string module_path;
  std::uint64_t seed = kDefaultSeed;
  std::vector<long long> fields{2, 3, 5};  // primes for stability / counting
  long long stability_budget = 2'000'000;  // subspace tuples per enumeration
  long long point_budget = 50'000'000;     // matrices materialized per count
  int trials = 8;                          // randomized isomorphism trials
  int threads = 0;                         // 0: BISERIAL_THREADS, else 1
  std::string format = "text";
  std::string dim_text, theta_text, rank_text;
  std::string n_text, r_text, to_text, lambda_text;
};

namespace cli_detail {

inline const char* error_name(const DomainError& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const BudgetExceeded*>(&e)) return "BudgetExceeded";
  if (dynamic_cast<const NonMonomialRelations*>(&e)) return "NonMonomialRelations";
  if (dynamic_cast<const NotCompleteGentle*>(&e)) return "NotCompleteGentle";
  if (dynamic_cast<const CompletionFailed*>(&e)) return "CompletionFailed";
  if (dynamic_cast<const SplitInconclusive*>(&e)) return "SplitInconclusive";
  if (dynamic_cast<const ThetaMismatch*>(&e)) return "ThetaMismatch";
  if (dynamic_cast<const GenericPointUnstable*>(&e)) return "GenericPointUnstable";
  if (dynamic_cast<const SummandNotStable*>(&e)) return "SummandNotStable";
  return "DomainError";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline QuiverFile load_quiver_file(const std::string& path) {
  return parse_quiver_file(read_file(path));
}

inline long long parse_integer(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(what);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed " + what + ": '" + s + "'");
  }
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// "v1=3,v2=-2" into an ordered map.
inline std::map<std::string, long long> parse_assignments(const std::string& text,
                                                          const std::string& what) {
  std::map<std::string, long long> out;
  if (text.empty()) return out;
  for (const std::string& item : split(text, ',')) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("malformed " + what + " entry '" + item + "'");
    out[item.substr(0, eq)] = parse_integer(item.substr(eq + 1), what + " value");
  }
  return out;
}

inline std::vector<long long> parse_integer_list(const std::string& text,
                                                 const std::string& what) {
  std::vector<long long> out;
  for (const std::string& item : split(text, ',')) out.push_back(parse_integer(item, what));
  return out;
}

inline DimVector resolve_dim(const JobConfig& cfg, const QuiverFile& qf) {
  if (!cfg.dim_text.empty()) {
    auto m = parse_assignments(cfg.dim_text, "dimension");
    return DimVector(m.begin(), m.end());
  }
  if (qf.dim) return *qf.dim;
  throw std::invalid_argument("no dimension vector: pass --dim or add a dim line to the file");
}

inline Weight resolve_theta(const JobConfig& cfg, const QuiverFile& qf) {
  if (!cfg.theta_text.empty()) {
    auto m = parse_assignments(cfg.theta_text, "weight");
    return Weight(m.begin(), m.end());
  }
  if (qf.theta) return *qf.theta;
  throw std::invalid_argument("no weight: pass --theta or add a theta line to the file");
}

inline StabilityOptions stability_options(const JobConfig& cfg) {
  StabilityOptions opts;
  opts.primes = cfg.fields;
  opts.subrep.max_tuples = cfg.stability_budget;
  return opts;
}

inline std::string rank_seq_text(const RankSequence& r, const Quiver& q) {
  std::string out = "(";
  bool first = true;
  for (const Arrow& a : q.arrows()) {
    if (!first) out += ",";
    out += a.id + ":" + std::to_string(r.at(a.id));
    first = false;
  }
  return out + ")";
}

inline std::string dim_vector_text(const DimVector& d) {
  std::string out;
  bool first = true;
  for (const auto& [v, n] : d) {
    if (!first) out += ",";
    out += v + "=" + std::to_string(n);
    first = false;
  }
  return out;
}

inline nlohmann::json map_to_json(const std::map<std::string, long long>& m) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j;
}

inline nlohmann::json verdict_to_json(const Verdict& v) {
  nlohmann::json j{{"pass", v.pass}};
  if (!v.pass) {
    j["axiom"] = v.axiom;
    j["witness"] = v.witness;
  }
  return j;
}

inline nlohmann::json factor_to_json(const DecompositionFactor& f) {
  nlohmann::json j;
  j["kind"] =
      f.kind == DecompositionFactor::Kind::BandFamily ? "band_family" : "orbit_closure";
  j["label"] = f.label;
  j["multiplicity"] = f.multiplicity;
  j["dim"] = map_to_json(f.dim);
  if (f.band) {
    j["word"] = word_to_string(f.band->letters());
    nlohmann::json ls = nlohmann::json::array();
    for (const Rat& l : f.lambdas) ls.push_back(rat_to_string(l));
    j["lambdas"] = ls;
  }
  return j;
}

inline void emit(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << "\n"; }

/// Completion wrapper shared by the pipeline commands: complete gentle input
/// passes through with an empty zero set.
inline std::pair<std::shared_ptr<const BoundQuiver>, std::set<std::string>> completed_of(
    const BoundQuiver& bq) {
  if (check_complete_gentle(bq))
    return {std::make_shared<const BoundQuiver>(bq), std::set<std::string>{}};
  return completion_with_zero_set(bq);
}

inline int cmd_validate(const JobConfig& cfg, std::ostream& out) {
  QuiverFile qf = load_quiver_file(cfg.input_path);
  BoundQuiver bq = to_bound_quiver(qf);
  Verdict sb = check_special_biserial(bq);
  Verdict g = check_gentle(bq);
  Verdict cg = check_complete_gentle(bq);
  auto yn = [](const Verdict& v) { return v.pass ? "yes" : "no"; };
  if (cfg.format == "json") {
    emit(out, nlohmann::json{{"special_biserial", verdict_to_json(sb)},
                             {"gentle", verdict_to_json(g)},
                             {"complete_gentle", verdict_to_json(cg)}});
    return 0;
  }
  out << "special biserial: " << yn(sb) << "; gentle: " << yn(g)
      << "; complete gentle: " << yn(cg) << "\n";
  for (const Verdict* v : {&sb, &g, &cg})
    if (!v->pass) out << "  " << v->axiom << " fails: " << v->witness << "\n";
  return 0;
}

inline int cmd_complete(const JobConfig& cfg, std::ostream& out) {
  QuiverFile qf = load_quiver_file(cfg.input_path);
  BoundQuiver bq = to_bound_quiver(qf);
  auto [closed, added] = completed_of(bq);
  QuiverFile result = from_bound_quiver(qf.name, *closed);
  result.dim = qf.dim;
  result.theta = qf.theta;
  if (cfg.format == "json") {
    nlohmann::json ja = nlohmann::json::array();
    for (const std::string& a : added) ja.push_back(a);
    emit(out, nlohmann::json{{"quiver_file", print_quiver_file(result)},
                             {"added_arrows", std::move(ja)}});
    return 0;
  }
  out << print_quiver_file(result);
  return 0;
}

inline int cmd_cycles(const JobConfig& cfg, std::ostream& out) {
  QuiverFile qf = load_quiver_file(cfg.input_path);
  BoundQuiver bq = to_bound_quiver(qf);
  auto [closed, added] = completed_of(bq);
  std::vector<std::vector<std::string>> cycles = effective_cycles(*closed);
  if (cfg.format == "json") {
    nlohmann::json jc = nlohmann::json::array();
    for (const auto& c : cycles) jc.push_back(c);
    nlohmann::json ja = nlohmann::json::array();
    for (const std::string& a : added) ja.push_back(a);
    emit(out, nlohmann::json{{"cycles", std::move(jc)}, {"added_arrows", std::move(ja)}});
    return 0;
  }
  if (!added.empty()) {
    out << "completed with arrows:";
    for (const std::string& a : added) out << " " << a;
    out << "\n";
  }
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    out << "cycle " << (i + 1) << ":";
    for (const std::string& a : cycles[i]) out << " " << a;
    out << "\n";
  }
  return 0;
}

inline int cmd_components(const JobConfig& cfg, std::ostream& out) {
  QuiverFile qf = load_quiver_file(cfg.input_path);
  BoundQuiver bq = to_bound_quiver(qf);
  DimVector d = resolve_dim(cfg, qf);
  auto [closed, zero] = completed_of(bq);
  std::vector<ComponentDescriptor> cs = components(closed, zero, d);
  if (cfg.format == "json") {
    nlohmann::json jc = nlohmann::json::array();
    for (const ComponentDescriptor& c : cs)
      jc.push_back(nlohmann::json{{"r", map_to_json(c.r)},
                                  {"d", map_to_json(c.d)},
                                  {"dimension", dim_component(c)}});
    emit(out, nlohmann::json{{"components", std::move(jc)}});
    return 0;
  }
  for (const ComponentDescriptor& c : cs)
    out << "r=" << rank_seq_text(c.r, closed->quiver()) << "  dim " << dim_component(c)
        << "\n";
  return 0;
}

inline int cmd_dim(const JobConfig& cfg, std::ostream& out) {
  CycleShape shape(parse_integer_list(cfg.n_text, "cycle dimension"));
  RankSeq r = parse_integer_list(cfg.r_text, "rank");
  long long value = dim_comp(shape, r);
  if (cfg.format == "json") {
    emit(out, nlohmann::json{{"dimension", value}});
    return 0;
  }
  out << value << "\n";
  return 0;
}

inline int cmd_count_points(const JobConfig& cfg, std::ostream& out) {
  CycleShape shape(parse_integer_list(cfg.n_text, "cycle dimension"));
  RankSeq r = parse_integer_list(cfg.r_text, "rank bound");
  CountOptions opt;
  opt.budget = cfg.point_budget;
  opt.threads = cfg.threads;
  nlohmann::json counts = nlohmann::json::array();
  for (long long q : cfg.fields) {
    long long n = count_points(shape, r, q, opt);
    if (cfg.format == "json")
      counts.push_back(nlohmann::json{{"q", q}, {"count", n}});
    else
      out << "q=" << q << ": " << n << "\n";
  }
  if (cfg.format == "json") emit(out, nlohmann::json{{"counts", std::move(counts)}});
  return 0;
}

inline int cmd_degenerate(const JobConfig& cfg, std::ostream& out) {
  CycleShape shape(parse_integer_list(cfg.n_text, "cycle dimension"));
  RankSeq r = parse_integer_list(cfg.r_text, "rank");
  RankSeq r2 = parse_integer_list(cfg.to_text, "target rank");
  Rat lambda = rational_from_string(cfg.lambda_text);
  Representation<Rat> rep = degeneration_path(shape, r, r2, lambda);
  if (cfg.format == "json") {
    emit(out, rep_to_json(rep));
    return 0;
  }
  for (const Arrow& a : rep.quiver().arrows()) {
    out << a.id << " =";
    const Matrix<Rat>& m = rep.mat(a.id);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      out << " [";
      for (std::size_t j = 0; j < m.cols(); ++j)
        out << (j ? " " : "") << rat_to_string(m.at(i, j));
      out << "]";
    }
    out << "\n";
  }
  return 0;
}

inline int cmd_decompose(const JobConfig& cfg, std::ostream& out) {
  QuiverFile qf = load_quiver_file(cfg.input_path);
  BoundQuiver bq = to_bound_quiver(qf);
  DimVector d = resolve_dim(cfg, qf);
  auto [closed, zero] = completed_of(bq);
  RankSequence r;
  auto given = parse_assignments(cfg.rank_text, "rank");
  for (const Arrow& a : closed->quiver().arrows()) {
    if (zero.count(a.id)) {
      r[a.id] = 0;
    } else if (auto it = given.find(a.id); it != given.end()) {
      r[a.id] = it->second;
    } else {
      throw std::invalid_argument("no rank given for arrow '" + a.id + "'");
    }
  }
  ComponentDescriptor c{closed, zero, d, r};
  Representation<Rat> sample = sample_generic(c, cfg.seed);
  PartialSummandList parts = decompose_partial(sample, cfg.seed);

  nlohmann::json js = nlohmann::json::array();
  for (const PartialSummand& s : parts) {
    std::string label;
    if (s.certified) {
      label = identification_to_string(identify(s.rep, closed, cfg.seed));
    } else {
      label = "piece of total dimension " + std::to_string(s.rep.total_dim()) +
              " with no rational splitting";
    }
    if (cfg.format == "json")
      js.push_back(nlohmann::json{{"multiplicity", s.multiplicity},
                                  {"certified", s.certified},
                                  {"identification", label},
                                  {"rep", rep_to_json(s.rep)}});
    else
      out << s.multiplicity << " x " << label << "\n";
  }
  if (cfg.format == "json") emit(out, nlohmann::json{{"summands", std::move(js)}});
  return 0;
}

inline int cmd_stability(const JobConfig& cfg, std::ostream& out) {
  QuiverFile qf = load_quiver_file(cfg.input_path);
  auto algebra = std::make_shared<const BoundQuiver>(to_bound_quiver(qf));
  Weight theta = resolve_theta(cfg, qf);
  nlohmann::json payload = nlohmann::json::parse(read_file(cfg.module_path), nullptr, true);
  Representation<Rat> rep = rep_from_json(payload, algebra);
  if (RelationCheck rc = check_relations(rep); !rc.ok)
    throw DomainError("module violates relation " + rc.failing);
  StabilityVerdict v = check_stability(rep, theta, stability_options(cfg));
  std::string status = detail::status_name(v.status);
  if (cfg.format == "json") {
    nlohmann::json j{{"status", status}, {"field_sensitive", v.field_sensitive}};
    j["witness"] = v.witness ? map_to_json(*v.witness) : nlohmann::json();
    j["notes"] = v.notes;
    emit(out, j);
    return 0;
  }
  out << status << "\n";
  if (v.witness) out << "witness: " << dim_vector_text(*v.witness) << "\n";
  if (v.field_sensitive) out << "note: verdict differs between primes\n";
  for (const std::string& n : v.notes) out << "note: " << n << "\n";
  return 0;
}

inline int cmd_moduli(const JobConfig& cfg, std::ostream& out) {
  QuiverFile qf = load_quiver_file(cfg.input_path);
  auto algebra = std::make_shared<const BoundQuiver>(to_bound_quiver(qf));
  DimVector d = resolve_dim(cfg, qf);
  Weight theta = resolve_theta(cfg, qf);
  auto table = moduli_structure(algebra, d, theta, cfg.seed, stability_options(cfg));
  if (cfg.format == "json") {
    nlohmann::json jt = nlohmann::json::array();
    for (const auto& [c, ms] : table) {
      nlohmann::json j{{"r", map_to_json(c.r)},
                       {"d", map_to_json(c.d)},
                       {"computed", ms.computed}};
      if (ms.computed) {
        j["exponents"] = ms.exponents;
        j["dimension"] = ms.dimension();
        j["structure"] = ms.render();
        nlohmann::json jf = nlohmann::json::array();
        for (const DecompositionFactor& f : ms.factors) jf.push_back(factor_to_json(f));
        j["factors"] = std::move(jf);
      } else {
        j["note"] = ms.note;
      }
      jt.push_back(std::move(j));
    }
    emit(out, nlohmann::json{{"components", std::move(jt)}});
    return 0;
  }
  for (const auto& [c, ms] : table) {
    const Quiver& q = c.algebra->quiver();
    out << "r=" << rank_seq_text(c.r, q) << "  ->  " << ms.render();
    if (ms.computed) out << "  (dim " << ms.dimension() << ")";
    out << "\n";
  }
  return 0;
}

}  // namespace cli_detail

/// Parses and runs one invocation. Exit codes: 0 success, 1 domain failure,
/// 2 usage failure.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  JobConfig cfg;
  CLI::App app{"computational toolkit for module varieties of gentle algebras"};
  app.require_subcommand(1);

  auto add_input = [&](CLI::App* sub) {
    sub->add_option("input", cfg.input_path, "quiver description file")->required();
  };
  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "output format")
        ->check(CLI::IsMember({"text", "json"}));
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", cfg.seed, "random seed (fixed default)");
  };

  CLI::App* validate = app.add_subcommand("validate", "report which axioms the input satisfies");
  add_input(validate);
  add_format(validate);

  CLI::App* complete = app.add_subcommand("complete", "emit the completed quiver file");
  add_input(complete);
  add_format(complete);

  CLI::App* cycles = app.add_subcommand("cycles", "list the effective cycles");
  add_input(cycles);
  add_format(cycles);

  CLI::App* comps = app.add_subcommand("components", "list rank-sequence components");
  add_input(comps);
  add_format(comps);
  comps->add_option("--dim", cfg.dim_text, "dimension vector v=n,...");

  CLI::App* dim = app.add_subcommand("dim", "dimension of one rank-bounded cycle variety");
  add_format(dim);
  dim->add_option("--n", cfg.n_text, "cycle dimensions n0,n1,...")->required();
  dim->add_option("--r", cfg.r_text, "rank sequence r0,r1,...")->required();

  CLI::App* count = app.add_subcommand("count-points", "count points over prime fields");
  add_format(count);
  count->add_option("--n", cfg.n_text, "cycle dimensions n0,n1,...")->required();
  count->add_option("--r", cfg.r_text, "rank bounds r0,r1,...")->required();
  count->add_option("--q", cfg.fields, "prime field sizes")->delimiter(',');
  count->add_option("--budget", cfg.point_budget, "max matrices materialized")
      ->check(CLI::PositiveNumber);
  count->add_option("--threads", cfg.threads, "worker threads (0: env, else 1)");

  CLI::App* degen = app.add_subcommand("degenerate", "evaluate the degeneration family");
  add_format(degen);
  degen->add_option("--n", cfg.n_text, "cycle dimensions n0,n1,...")->required();
  degen->add_option("--r", cfg.r_text, "rank sequence at the generic end")->required();
  degen->add_option("--to", cfg.to_text, "rank sequence degenerated to")->required();
  degen->add_option("--lambda", cfg.lambda_text, "family parameter, a rational")->required();

  CLI::App* dec = app.add_subcommand("decompose", "decompose a generic point of a component");
  add_input(dec);
  add_format(dec);
  add_seed(dec);
  dec->add_option("--dim", cfg.dim_text, "dimension vector v=n,...");
  dec->add_option("--rank", cfg.rank_text, "rank sequence a=r,...")->required();

  CLI::App* stab = app.add_subcommand("stability", "judge a module against a weight");
  add_input(stab);
  add_format(stab);
  stab->add_option("--module", cfg.module_path, "module payload file")->required();
  stab->add_option("--theta", cfg.theta_text, "weight v=w,...");
  stab->add_option("--primes", cfg.fields, "primes for the reduction")->delimiter(',');
  stab->add_option("--stability-budget", cfg.stability_budget, "max subspace tuples")
      ->check(CLI::PositiveNumber);

  CLI::App* moduli = app.add_subcommand("moduli", "moduli structure of every component");
  add_input(moduli);
  add_format(moduli);
  add_seed(moduli);
  moduli->add_option("--dim", cfg.dim_text, "dimension vector v=n,...");
  moduli->add_option("--theta", cfg.theta_text, "weight v=w,...");
  moduli->add_option("--primes", cfg.fields, "primes for the reduction")->delimiter(',');
  moduli->add_option("--stability-budget", cfg.stability_budget, "max subspace tuples")
      ->check(CLI::PositiveNumber);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (app.got_subcommand(validate)) return cli_detail::cmd_validate(cfg, out);
    if (app.got_subcommand(complete)) return cli_detail::cmd_complete(cfg, out);
    if (app.got_subcommand(cycles)) return cli_detail::cmd_cycles(cfg, out);
    if (app.got_subcommand(comps)) return cli_detail::cmd_components(cfg, out);
    if (app.got_subcommand(dim)) return cli_detail::cmd_dim(cfg, out);
    if (app.got_subcommand(count)) return cli_detail::cmd_count_points(cfg, out);
    if (app.got_subcommand(degen)) return cli_detail::cmd_degenerate(cfg, out);
    if (app.got_subcommand(dec)) return cli_detail::cmd_decompose(cfg, out);
    if (app.got_subcommand(stab)) return cli_detail::cmd_stability(cfg, out);
    if (app.got_subcommand(moduli)) return cli_detail::cmd_moduli(cfg, out);
    err << "usage error: no command\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    err << cli_detail::error_name(e) << ": " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace biserial
