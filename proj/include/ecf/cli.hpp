#pragma once

// Command-line front end.  All subcommand output goes through the supplied
// streams so the whole surface is drivable in-process; main() is a thin
// wrapper.  Exit codes are a stable contract:
//   0  factored / prime input / successful run
//   1  usage error (bad flags, bad numbers, invalid combinations)
//   2  exceptional outcome or oracle refusal
//   3  I/O failure (including refusal to overwrite an existing census file)
//
// stdout carries machine-readable key=value or CSV lines; warnings and
// progress go to stderr.  For a fixed --seed, stdout is byte-stable except
// for timing fields.

#include "ecf/census.hpp"
#include "ecf/factoring.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ecf {
namespace detail {

inline std::optional<Natural> parse_natural(const std::string& s) {
  if (s.empty() || s.size() > 10000) return std::nullopt;
  for (const char c : s)
    if (c < '0' || c > '9') return std::nullopt;
  return Natural(s);
}

inline const char* variant_flag_name(Variant v) {
  return v == Variant::Aggregate ? "t2" : "t1";
}

// Shared key=value printer for factor outcomes.
inline int report_outcome(const FactorOutcome& o, std::uint64_t queries,
                          std::ostream& out) {
  switch (o.kind) {
    case FactorOutcome::Kind::Factored: {
      const FactorWitness& w = *o.witness;
      out << "outcome=factored\n";
      out << "divisor=" << w.divisor << "\n";
      out << "cofactor=" << w.cofactor << "\n";
      out << "source=" << witness_source_name(w.source) << "\n";
      if (w.b_used) out << "b_used=" << *w.b_used << "\n";
      out << "oracle_queries=" << queries << "\n";
      return 0;
    }
    case FactorOutcome::Kind::InputIsPrime:
      out << "outcome=input_is_prime\n";
      out << "oracle_queries=" << queries << "\n";
      return 0;
    case FactorOutcome::Kind::Exceptional:
      out << "outcome=exceptional\n";
      out << "reason=" << reason_tag(o.reason) << "\n";
      out << "oracle_queries=" << queries << "\n";
      return 2;
    case FactorOutcome::Kind::Invalid:
      break;
  }
  out << "outcome=invalid\n";
  return 1;
}

struct SweepFlags {
  std::string variant{"t1"};
  std::string k_policy{"one"};
  std::uint64_t seed{0};
  std::optional<long double> gamma;
  std::optional<long double> c;
  std::optional<std::uint64_t> z;
  std::optional<std::uint64_t> B;
};

// Resolve (variant, z, B) from flags; fallback gives the values used when
// neither a derivation exponent nor explicit overrides are present.
inline AlgoParams resolve_params(const SweepFlags& f, const Natural& N,
                                 std::optional<AlgoParams> fallback, std::ostream& err) {
  const Variant v = f.variant == "t2" ? Variant::Aggregate : Variant::PerCurve;
  if (f.gamma && v == Variant::Aggregate)
    throw std::invalid_argument("--gamma applies to --variant t1 only");
  if (f.c && v == Variant::PerCurve)
    throw std::invalid_argument("--c applies to --variant t2 only");
  AlgoParams p;
  if (v == Variant::PerCurve) {
    if (!f.gamma && fallback) {
      p = *fallback;
      p.variant = Variant::PerCurve;
    } else {
      p = derive_params(N, f.gamma.value_or(2.05L));
    }
  } else {
    p = derive_params_tilde(N, f.c.value_or(1.0L));
  }
  p.N = N;
  if (f.z) p.z = *f.z;
  if (f.B) p.B = *f.B;
  if (p.z < p.B)
    err << "warning: z = " << p.z << " < B = " << p.B
        << "; derived parameter shapes keep z >= B\n";
  return p;
}

inline OracleConfig resolve_oracle(const SweepFlags& f, const AlgoParams& p) {
  OracleConfig cfg;
  cfg.policy = f.k_policy == "seeded" ? MultiplierPolicy::SeededPseudorandom
                                      : MultiplierPolicy::AlwaysOne;
  cfg.seed = f.seed;
  cfg.bound = p.variant == Variant::Aggregate
                  ? default_oracle_bound_aggregate(p.N, p.B)
                  : default_oracle_bound(p.N);
  return cfg;
}

inline void add_sweep_flags(CLI::App* sub, SweepFlags& f) {
  sub->add_option("--variant", f.variant,
                  "sweep shape: t1 = per-curve queries, t2 = single aggregate query")
      ->check(CLI::IsMember({"t1", "t2"}));
  sub->add_option("--k-policy", f.k_policy,
                  "oracle multiplier: one = always 1, seeded = pseudorandom in [1,16]")
      ->check(CLI::IsMember({"one", "seeded"}));
  sub->add_option("--seed", f.seed, "seed for the seeded multiplier policy");
  sub->add_option("--gamma", f.gamma,
                  "t1 exponent: B = (ln N)^gamma, z = (ln N)^beta (natural log)");
  sub->add_option("--c", f.c, "t2 slope: z = B = floor(c ln N) (natural log)");
  sub->add_option("--z", f.z, "trial division bound (overrides the derived value)");
  sub->add_option("--B", f.B, "curve parameter sweep bound (overrides the derived value)");
}

}  // namespace detail

// Parse and execute one invocation; args excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out,
                   std::ostream& err) {
  CLI::App app{"oracle-assisted integer factoring via curve sweeps over residue rings"};
  app.require_subcommand(1);

  auto* factor = app.add_subcommand("factor", "factor one integer");
  std::string n_str;
  factor->add_option("n", n_str, "integer to factor (decimal)")->required();
  detail::SweepFlags factor_flags;
  detail::add_sweep_flags(factor, factor_flags);

  auto* census = app.add_subcommand(
      "census", "run the sweep over all odd square-free z-rough n <= nmax");
  std::uint64_t census_nmax = 1000000;
  census->add_option("--nmax", census_nmax, "class upper bound (default 10^6)");
  detail::SweepFlags census_flags;
  detail::add_sweep_flags(census, census_flags);
  std::string census_out;
  census->add_option("--out", census_out,
                     "JSONL record path (default: $ECFACTOR_OUT_DIR/census.jsonl)");
  unsigned census_workers = 0;
  census->add_option("--workers", census_workers, "worker threads (0 = auto)");
  bool census_resume = false, census_force = false, census_progress = false;
  census->add_flag("--resume", census_resume, "continue an existing record file");
  census->add_flag("--force", census_force, "overwrite an existing record file");
  census->add_flag("--progress", census_progress, "report shard progress on stderr");

  auto* nn = app.add_subcommand(
      "nn-stats", "least non-residue statistics over odd square-free n <= nmax");
  std::uint64_t nn_nmax = 0;
  nn->add_option("--nmax", nn_nmax, "upper bound")->required();
  std::string nn_thresholds;
  nn->add_option("--thresholds", nn_thresholds,
                 "comma-separated thresholds (default: floor((ln nmax)^2))");

  auto* dump = app.add_subcommand("oracle-dump",
                                  "print exact curve group orders the oracle would use");
  std::string dump_n;
  dump->add_option("--n", dump_n, "target integer (odd, square-free)")->required();
  std::uint64_t dump_B = 10;
  dump->add_option("--B", dump_B, "largest curve parameter b");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("ecfactor");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (factor->parsed()) {
      const auto n = detail::parse_natural(n_str);
      if (!n || *n < 2) {
        err << "error: n must be a decimal integer >= 2\n";
        return 1;
      }
      const Natural N = *n < 16 ? Natural(16) : *n;
      const AlgoParams params = detail::resolve_params(factor_flags, N, std::nullopt, err);
      MultEllSimulator sim(detail::resolve_oracle(factor_flags, params));
      const FactorOutcome outcome = factor_pipeline(*n, params, sim);
      out << "n=" << *n << "\n";
      out << "variant=" << detail::variant_flag_name(params.variant) << "\n";
      out << "z=" << params.z << "\n";
      out << "B=" << params.B << "\n";
      return detail::report_outcome(outcome, sim.ledger().queries.load(), out);
    }

    if (census->parsed()) {
      if (census_nmax < 10) {
        err << "error: --nmax must be >= 10\n";
        return 1;
      }
      std::optional<AlgoParams> fallback;
      if (census_flags.variant == "t1" && !census_flags.gamma) {
        AlgoParams p;
        p.N = census_nmax;
        p.z = 20;
        p.B = 200;
        fallback = p;
      }
      const AlgoParams params =
          detail::resolve_params(census_flags, Natural(census_nmax), fallback, err);
      CensusConfig cfg;
      cfg.filter = RoughSquareFreeFilter{Natural(census_nmax), params.z};
      cfg.params = params;
      cfg.oracle = detail::resolve_oracle(census_flags, params);
      cfg.workers = census_workers;
      cfg.resume = census_resume;
      cfg.force = census_force;
      if (!census_out.empty()) {
        cfg.out_path = census_out;
      } else {
        const char* dir = std::getenv("ECFACTOR_OUT_DIR");
        cfg.out_path = std::string(dir ? dir : ".") + "/census.jsonl";
      }
      if (census_progress)
        cfg.on_progress = [&err](std::uint64_t done, std::uint64_t total) {
          err << "census: shard " << done << "/" << total << "\n";
        };
      const CensusSummary summary = run_census(cfg);
      out << CensusSummary::csv_header() << "\n" << summary.csv_line() << "\n";
      return 0;
    }

    if (nn->parsed()) {
      if (nn_nmax < 3) {
        err << "error: --nmax must be >= 3\n";
        return 1;
      }
      std::vector<std::uint64_t> thresholds;
      if (nn_thresholds.empty()) {
        const long double l = detail::ln_natural(Natural(nn_nmax));
        thresholds.push_back(static_cast<std::uint64_t>(l * l));
      } else {
        std::string token;
        std::istringstream stream(nn_thresholds);
        while (std::getline(stream, token, ',')) {
          const auto t = detail::parse_natural(token);
          if (!t || *t > UINT64_MAX) {
            err << "error: bad threshold '" << token << "'\n";
            return 1;
          }
          thresholds.push_back(static_cast<std::uint64_t>(*t));
        }
        if (thresholds.empty()) {
          err << "error: --thresholds needs at least one value\n";
          return 1;
        }
      }
      const NnStatistics stats = nn_statistics(Natural(nn_nmax), thresholds);
      out << "threshold,exceeding_count,fraction\n";
      for (const auto& [t, count] : stats.rows) {
        const double frac =
            stats.total ? static_cast<double>(count) / static_cast<double>(stats.total) : 0.0;
        out << t << ',' << count << ',' << frac << "\n";
      }
      return 0;
    }

    if (dump->parsed()) {
      const auto n = detail::parse_natural(dump_n);
      if (!n || *n < 3) {
        err << "error: --n must be a decimal integer >= 3\n";
        return 1;
      }
      if (!is_squarefree(*n)) {
        out << "★★★\n";
        return 2;
      }
      if ((*n & 1) == 0) {
        err << "error: --n must be odd\n";
        return 1;
      }
      MultEllSimulator sim(OracleConfig{});
      for (std::uint64_t b = 1; b <= dump_B; ++b) {
        if (gcd(Natural(b), *n) != 1) continue;
        const auto count = sim.exact_count(*n, Natural(b));
        out << *n << ',' << b << ',' << *count << "\n";
      }
      return 0;
    }
  } catch (const OutputConflictError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

}  // namespace ecf
