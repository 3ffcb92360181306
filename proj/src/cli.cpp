#include "dsieve/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>

#include "dsieve/dimension.hpp"
#include "dsieve/errors.hpp"
#include "dsieve/oracle.hpp"
#include "dsieve/rational.hpp"
#include "dsieve/serialize.hpp"
#include "dsieve/sieve.hpp"

namespace dsieve {

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = kExitOk;
  Json json;
};

struct Context {
  const Config& cfg;
  RunSettings rs;
  fs::path out;
  std::ostream& err;
  SequenceSpec spec;
  Schedule schedule;
  CheckpointChain chain;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + p.string() + "'");
  f << text;
}

void write_json(const fs::path& p, const Json& j) { write_text(p, j.dump(2) + "\n"); }

Json header(const std::string& command, const Context& ctx) {
  return Json{{"command", command},
              {"config_fingerprint", ctx.cfg.fingerprint()},
              {"config", ctx.cfg.values()},
              {"sequence", ctx.spec.describe()},
              {"N", ctx.rs.N}};
}

int worst(int a, int b) { return a == kExitOk ? b : a; }

Outcome do_check(Context& ctx) {
  const ConditionReport chain_report = check_conditions(ctx.spec, ctx.schedule, ctx.chain, CheckMode::chain, ctx.rs.precision);
  const ConditionReport universal = check_conditions(ctx.spec, ctx.schedule, ctx.chain, CheckMode::universal, ctx.rs.precision);
  Outcome o;
  o.json = Json{{"schedule", to_json(ctx.schedule.info)},
                {"eta", to_string(ctx.schedule.eta)},
                {"chain", to_json(ctx.chain)},
                {"conditions", to_json(chain_report)},
                {"universal", to_json(universal)}};
  if (const ConditionResult* b = chain_report.binding()) {
    o.code = b->verdict == Verdict::undecidable ? kExitInconclusive : kExitConditionViolated;
    ctx.err << "condition " << b->name << " " << to_string(b->verdict);
    if (b->first_failing) ctx.err << " at n=" << *b->first_failing;
    if (!b->lhs.empty()) ctx.err << ": " << b->lhs << ' ' << b->relation << ' ' << b->rhs << " required";
    ctx.err << '\n';
  }
  return o;
}

Outcome do_sieve(Context& ctx) {
  SieveOptions opt;
  opt.strict = ctx.rs.strict;
  opt.precision = ctx.rs.precision;
  const SieveTrace trace = run_sieve_full(ctx.spec, ctx.schedule, ctx.chain, opt);
  Json t = to_json(trace);
  t["config_fingerprint"] = ctx.cfg.fingerprint();
  write_json(ctx.out / "trace.json", t);
  Outcome o;
  o.json = Json{{"final_measure", to_string(trace.final_measure)},
                {"final_measure_approx", to_decimal(trace.final_measure)},
                {"theorem_bound", to_string(trace.theorem_bound)},
                {"initial_measure", to_string(trace.initial_measure)},
                {"initial_bound", to_string(trace.initial_bound)},
                {"all_within", trace.all_within()},
                {"all_proven", trace.all_proven()}};
  return o;
}

Outcome do_witness(Context& ctx) {
  PathOptions opt;
  opt.pick = ctx.rs.pick;
  opt.seed = ctx.rs.seed;
  opt.max_nodes = ctx.rs.max_nodes;
  opt.precision = ctx.rs.precision;
  const Certificate cert = extract_witness(ctx.spec, ctx.schedule, ctx.chain, opt);
  Json c = to_json(cert);
  c["config_fingerprint"] = ctx.cfg.fingerprint();
  c["schedule_fingerprint"] = schedule_fingerprint(ctx.schedule, ctx.rs.N);
  c["sequence"] = ctx.spec.describe();
  c["eta"] = to_string(ctx.schedule.eta);
  c["N"] = ctx.rs.N;
  write_json(ctx.out / "certificate.json", c);
  Outcome o;
  o.json = Json{{"alpha", to_string(cert.alpha)},
                {"binary", cert.binary_expansion()},
                {"margins", to_json(cert.margins, false)},
                {"schedule", to_json(ctx.schedule.info)}};
  return o;
}

Outcome do_dimension(Context& ctx) {
  const std::string source_name = ctx.cfg.get_or("dimension.source", "chain");
  const std::int64_t k_max = ctx.cfg.integer_or("dimension.k_max", 64);
  if (k_max < 1) ctx.cfg.fail("dimension.k_max", "must be >= 1");
  const mpq_class eps = ctx.cfg.rational_or("dimension.epsilon", mpq_class(1, 4096));

  SeriesSource source;
  if (source_name == "chain") {
    source = ChainSource{ctx.spec, ctx.schedule, ctx.chain};
  } else if (source_name == "eggleston-geometric") {
    const mpq_class sigma = ctx.cfg.rational("dimension.sigma");
    const mpq_class m = ctx.cfg.rational("dimension.m");
    if (sigma.get_den() != 1 || m.get_den() != 1) ctx.cfg.fail("dimension.sigma", "sigma and m must be integers");
    source = eggleston_geometric(sigma.get_num(), m.get_num(), static_cast<std::size_t>(k_max));
  } else if (source_name == "harvest") {
    PathOptions opt;
    opt.pick = ctx.rs.pick;
    opt.seed = ctx.rs.seed;
    opt.max_nodes = ctx.rs.max_nodes;
    opt.precision = ctx.rs.precision;
    source = harvest(extract_witness(ctx.spec, ctx.schedule, ctx.chain, opt));
  } else {
    ctx.cfg.fail("dimension.source", "expected chain, eggleston-geometric or harvest");
  }

  const auto K = static_cast<std::size_t>(k_max);
  const DimensionReport dim = dimension_lower_bound(source, eps, K, ctx.rs.precision);
  mpq_class nu = dim.nu_star > 0 ? dim.nu_star : mpq_class(1, 2);
  if (ctx.cfg.has("dimension.nu")) nu = ctx.cfg.rational("dimension.nu");
  const SeriesReport series = series_terms(source, nu, K, ctx.rs.precision);
  write_text(ctx.out / "series.csv", series_csv(series));

  Outcome o;
  o.json = Json{{"source", source_name}, {"lower_bound", to_json(dim)}, {"series", to_json(series)}};
  const bool asked = ctx.cfg.has("dimension.nu");
  if ((asked && series.verdict == SeriesVerdict::inconclusive) || (!asked && dim.nu_star == 0 && !dim.inconclusive.empty()))
    o.code = kExitInconclusive;
  return o;
}

Outcome do_oracle(Context& ctx) {
  const std::int64_t budget = ctx.cfg.integer_or("oracle.budget", 10'000'000);
  const std::int64_t listed = ctx.cfg.integer_or("oracle.max_listed", 1000);
  const ScheduleTable tab = tabulate(ctx.schedule, ctx.rs.N);
  const DeltaFn delta = [&tab](std::int64_t n) { return tab.delta[n]; };
  const IntervalUnion exact = exact_bad_set(ctx.spec, delta, ctx.rs.N, static_cast<std::size_t>(budget));
  Outcome o;
  o.json = Json{{"exact_set", to_json(exact, static_cast<std::size_t>(std::max<std::int64_t>(listed, 0)))}};

  const ConditionReport cond = check_conditions(ctx.spec, ctx.schedule, ctx.chain, CheckMode::chain, ctx.rs.precision);
  if (!cond.all_pass()) {
    o.json["comparison"] = "skipped: schedule conditions do not hold";
    o.code = kExitConditionViolated;
    ctx.err << "oracle: sieve comparison skipped, condition " << cond.binding()->name << " does not pass\n";
    return o;
  }
  SieveOptions opt;
  opt.strict = ctx.rs.strict;
  opt.precision = ctx.rs.precision;
  const SieveTrace trace = run_sieve_full(ctx.spec, ctx.schedule, ctx.chain, opt);
  const Comparison cmp = compare_with_sieve(exact, trace.survivors, OracleInstance{ctx.spec, delta, ctx.rs.N});
  o.json["comparison"] = to_json(cmp);
  if (!cmp.contained) {
    o.code = kExitInternalBreach;
    ctx.err << "oracle: survivor cell " << to_string(*cmp.bad_cell) << " is not inside the exact set\n";
  }
  return o;
}

int run_command(const std::string& command, Context& ctx) {
  Json report = header(command, ctx);
  int code = kExitOk;
  auto section = [&](const char* name, Outcome o) {
    report[name] = std::move(o.json);
    code = worst(code, o.code);
  };

  if (command == "sequence") {
    const mpq_class tau = ctx.cfg.rational_or("sequence.tau", 2);
    Sequence seq(ctx.spec, ctx.rs.precision);
    Json terms = Json::array();
    for (std::int64_t n = 1; n <= ctx.rs.N; ++n) {
      Json e = to_json(seq.at(n));
      e["n"] = n;
      e["H"] = growth_index(seq, n, tau);
      terms.push_back(std::move(e));
    }
    report["tau"] = to_string(tau);
    report["terms"] = terms;
  } else if (command == "check") {
    section("check", do_check(ctx));
  } else if (command == "sieve" || command == "witness" || command == "oracle") {
    Outcome check = do_check(ctx);
    const int check_code = check.code;
    section("check", std::move(check));
    if (check_code == kExitOk || command == "oracle") {
      if (command == "sieve") section("sieve", do_sieve(ctx));
      if (command == "witness") section("witness", do_witness(ctx));
      if (command == "oracle") {
        Outcome o = do_oracle(ctx);
        report["oracle"] = std::move(o.json);
        if (check_code == kExitOk) code = worst(code, o.code);
      }
    }
  } else if (command == "dimension") {
    section("dimension", do_dimension(ctx));
  } else if (command == "report") {
    Outcome check = do_check(ctx);
    const int check_code = check.code;
    section("check", std::move(check));
    if (check_code == kExitOk) {
      if (ctx.rs.mode == "full") {
        section("sieve", do_sieve(ctx));
        if (ctx.spec.exact()) {
          try {
            section("oracle", do_oracle(ctx));
          } catch (const BudgetExceeded& e) {
            report["oracle"] = std::string("skipped: ") + e.what();
          }
        }
      } else {
        section("witness", do_witness(ctx));
      }
      section("dimension", do_dimension(ctx));
    }
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  report["exit_code"] = code;
  write_json(ctx.out / "report.json", report);
  return code;
}

}  // namespace

int dispatch(const std::string& command, const Config& config, std::ostream& err) {
  try {
    const RunSettings rs = run_settings(config);
    fs::create_directories(rs.output_dir);
    const SequenceSpec spec = sequence_from(config);
    const bool schedule_free =
        command == "sequence" ||
        (command == "dimension" && config.get_or("dimension.source", "chain") == "eggleston-geometric");
    Schedule schedule = schedule_free ? constant_schedule(1, mpq_class(1, 2), mpq_class(1, 2))
                                      : schedule_from(config, spec, rs.N);
    CheckpointChain chain = build_chain(schedule, rs.N);
    Context ctx{config, rs, fs::path(rs.output_dir), err, spec, std::move(schedule), std::move(chain)};
    return run_command(command, ctx);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ConditionViolated& e) {
    err << "condition violated: " << e.what() << '\n';
    return kExitConditionViolated;
  } catch (const SearchExhausted& e) {
    err << "search exhausted: " << e.what() << '\n';
    return kExitSearchExhausted;
  } catch (const PrecisionCeiling& e) {
    err << "precision ceiling: " << e.what() << '\n';
    return kExitInconclusive;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitInconclusive;
  } catch (const InternalBoundBreach& e) {
    err << "internal bound breach: " << e.what() << '\n';
    return kExitInternalBreach;
  } catch (const fs::filesystem_error& e) {
    err << "filesystem error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

int run_cli(int argc, char** argv, std::ostream& err) {
  CLI::App app{"Dyadic exclusion sieve: hypothesis checks, measure certificates and witnesses"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::int64_t> n_flag;
  int threads = 0;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"sequence", "dump terms and growth indices"},
      {"check", "check the schedule hypotheses"},
      {"sieve", "full-set sieve with measure certificate"},
      {"witness", "path-mode witness extraction"},
      {"dimension", "series verdicts and dimension lower bound"},
      {"oracle", "exact bad set and comparison with the sieve"},
      {"report", "aggregate run"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "config file");
    sub->add_option("--N", n_flag, "override run.N");
    sub->add_option("--threads", threads, "worker threads (results do not depend on it)");
    sub->allow_extras();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, err, err);
    return rc == 0 ? kExitOk : kExitConfigError;
  }
  CLI::App* sub = app.get_subcommands().front();

  try {
    Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
    std::vector<std::string> extras = sub->remaining();
    for (std::size_t i = 0; i < extras.size(); ++i) {
      std::string tok = extras[i];
      if (tok.rfind("--", 0) != 0) throw ConfigError("unexpected argument '" + tok + "'");
      tok = tok.substr(2);
      std::string value;
      if (const auto eq = tok.find('='); eq != std::string::npos) {
        value = tok.substr(eq + 1);
        tok = tok.substr(0, eq);
      } else if (i + 1 < extras.size()) {
        value = extras[++i];
      } else {
        throw ConfigError("flag --" + tok + " needs a value");
      }
      cfg.set(tok, value, "--" + tok);
    }
    if (n_flag) cfg.set("run.N", std::to_string(*n_flag), "--N");
    if (threads > 0) cfg.set("run.threads", std::to_string(threads), "--threads");
    return dispatch(sub->get_name(), cfg, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }
}

}  // namespace dsieve
