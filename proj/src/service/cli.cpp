#include "cathode/service/cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "cathode/error.hpp"
#include "cathode/knowledge/search.hpp"
#include "cathode/pipeline/exploitation.hpp"
#include "cathode/pipeline/exploration.hpp"
#include "cathode/service/server.hpp"
#include "cathode/service/session_store.hpp"

namespace cathode {
namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

// Arguments that name readable files contribute one formula per line (first
// comma field; blank lines and '#' comments skipped); others are formulas.
std::vector<Formula> read_formulas(const std::vector<std::string>& items) {
  std::vector<Formula> out;
  for (const auto& item : items) {
    if (!std::filesystem::is_regular_file(item)) {
      out.push_back(Formula::parse(item));
      continue;
    }
    std::ifstream in(item);
    if (!in) throw Error(ErrorKind::FileUnreadable, item);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto start = line.find_first_not_of(" \t");
      if (start == std::string::npos || line[start] == '#') continue;
      std::string token = line.substr(start, line.find(',', start) - start);
      while (!token.empty() && std::isspace(static_cast<unsigned char>(token.back()))) token.pop_back();
      if (first && token == "formula") {
        first = false;
        continue;
      }
      first = false;
      out.push_back(Formula::parse(token));
    }
  }
  return out;
}

struct Globals {
  bool json = false;
  std::string config;
  std::string data_dir;
  std::string snapshot;
  std::string backend;
};

EngineConfig engine_config(const Globals& g) {
  EngineConfig c = g.config.empty() ? EngineConfig{} : load_engine_config(g.config);
  if (!g.snapshot.empty()) c.snapshot = g.snapshot;
  if (!g.data_dir.empty()) c.data_dir = g.data_dir;
  if (!g.backend.empty()) c.backend = parse_backend_flag(g.backend);
  c.validate();
  return c;
}

std::atomic<ApiServer*> g_server{nullptr};

void handle_signal(int) {
  if (auto* s = g_server.load()) s->stop();
}

nlohmann::json rank_json(const RankOutcome& o) { return to_json(o); }

void print_entries(std::ostream& out, const std::string& title, const std::vector<RankEntry>& entries) {
  out << title << " (" << entries.size() << ")\n";
  std::size_t n = 1;
  for (const auto& e : entries) {
    out << "  " << pad(std::to_string(n++), 4) << pad(e.formula.render(), 44) << pad(fixed(e.charge, 6), 14)
        << pad(fixed(e.capacity, 2), 10) << e.complexity << "\n";
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cathode discovery engine", "cathode"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "Machine-readable JSON output");
  app.add_option("--config", g.config, "Engine config file (JSON)");
  app.add_option("--data-dir", g.data_dir, "Session data directory");
  app.add_option("--snapshot", g.snapshot, "Compound snapshot CSV");
  app.add_option("--backend", g.backend, "scripted:<transcript.jsonl> or live");

  std::string formula_arg;
  auto* parse_cmd = app.add_subcommand("parse", "Parse and normalize a formula");
  parse_cmd->add_option("formula", formula_arg)->required();

  std::vector<std::string> formula_list;
  auto* capacity_cmd = app.add_subcommand("capacity", "Theoretical capacity in mAh/g");
  capacity_cmd->add_option("formulas", formula_list)->required();
  auto* charge_cmd = app.add_subcommand("charge", "Heuristic total charge");
  charge_cmd->add_option("formulas", formula_list)->required();

  std::string dist_a;
  std::string dist_b;
  auto* distance_cmd = app.add_subcommand("distance", "Weighted formula distance");
  distance_cmd->add_option("a", dist_a)->required();
  distance_cmd->add_option("b", dist_b)->required();

  std::optional<double> tau_opt;
  auto* dedup_cmd = app.add_subcommand("dedup", "Remove range-matching repeats (first kept)");
  dedup_cmd->add_option("--tau", tau_opt, "Range-match threshold (default from config)");
  dedup_cmd->add_option("inputs", formula_list, "Files or formulas")->required();

  bool skip_voltage = false;
  auto* rank_cmd = app.add_subcommand("rank", "Charge, complexity and voltage ranking");
  rank_cmd->add_flag("--skip-voltage", skip_voltage, "Stop after the complexity stage");
  rank_cmd->add_option("inputs", formula_list, "Files or formulas")->required();

  std::string seed_text = "LiNi0.8Mn0.1Co0.1O2";
  std::optional<std::size_t> k_opt;
  std::optional<std::size_t> cycles_opt;
  std::optional<std::size_t> trees_opt;
  std::string events_out;
  auto* explore_cmd = app.add_subcommand("explore", "Run the generation rounds to completion");
  explore_cmd->add_option("--seed", seed_text, "Seed formula");
  explore_cmd->add_option("--k", k_opt, "Valid candidates per parent");
  explore_cmd->add_option("--cycles", cycles_opt, "Cycles per tree");
  explore_cmd->add_option("--trees", trees_opt, "Independent trees");
  explore_cmd->add_option("--events-out", events_out, "Write the session event log here");

  std::string listen;
  auto* serve_cmd = app.add_subcommand("serve", "Start the HTTP API");
  serve_cmd->add_option("--listen", listen, "host:port (default from config)");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (*parse_cmd) {
      const Formula f = Formula::parse(formula_arg);
      const double mw = molecular_weight(f);
      if (g.json) {
        auto terms = nlohmann::json::array();
        for (const auto& t : f.terms()) terms.push_back({{"element", t.element.symbol()}, {"coefficient", t.coefficient}});
        out << nlohmann::json{{"formula", f.render()},
                              {"canonical_key", f.canonical_key()},
                              {"terms", terms},
                              {"species_count", f.species_count()},
                              {"merged_duplicates", f.merged_duplicates()},
                              {"molecular_weight", mw}}
                   .dump()
            << "\n";
      } else {
        out << "formula           " << f.render() << "\n"
            << "canonical key     " << f.canonical_key() << "\n"
            << "elements          " << f.species_count() << "\n"
            << "molecular weight  " << fixed(mw, 4) << " g/mol\n";
        for (const auto& t : f.terms()) out << "  " << pad(std::string(t.element.symbol()), 4) << format_coefficient(t.coefficient) << "\n";
      }
      return 0;
    }

    const EngineConfig config = engine_config(g);

    if (*capacity_cmd || *charge_cmd) {
      const bool cap = capacity_cmd->parsed();
      auto rows = nlohmann::json::array();
      for (const auto& text : formula_list) {
        const Formula f = Formula::parse(text);
        const double v = cap ? theoretical_capacity(f) : total_charge(f, config.metrics.valences);
        if (g.json) {
          rows.push_back({{"formula", f.render()}, {cap ? "capacity" : "charge", v}});
        } else {
          out << pad(f.render(), 44) << (cap ? fixed(v, 2) + " mAh/g" : fixed(v, 6)) << "\n";
        }
      }
      if (g.json) out << rows.dump() << "\n";
      return 0;
    }

    if (*distance_cmd) {
      const Formula a = Formula::parse(dist_a);
      const Formula b = Formula::parse(dist_b);
      const double d = formula_distance(a, b, config.metrics.weights);
      if (g.json) {
        out << nlohmann::json{{"a", a.render()}, {"b", b.render()}, {"distance", d}}.dump() << "\n";
      } else {
        out << format_coefficient(d) << "\n";
      }
      return 0;
    }

    if (*dedup_cmd) {
      const auto formulas = read_formulas(formula_list);
      const double tau = tau_opt.value_or(config.session.tau);
      if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::InvalidArgument, "tau must lie in (0, 1)");
      const auto result = dedup_candidates(formulas, tau);
      if (g.json) {
        auto unique = nlohmann::json::array();
        for (auto i : result.unique) unique.push_back(formulas[i].render());
        auto removed = nlohmann::json::array();
        for (const auto& r : result.removed) {
          removed.push_back({{"index", r.index},
                             {"formula", formulas[r.index].render()},
                             {"duplicate_of", formulas[r.duplicate_of].render()}});
        }
        out << nlohmann::json{{"unique", unique}, {"removed", removed}}.dump() << "\n";
      } else {
        out << result.unique.size() << " unique, " << result.removed.size() << " removed\n";
        for (const auto& r : result.removed) {
          out << "  - " << pad(formulas[r.index].render(), 44) << "matches " << formulas[r.duplicate_of].render()
              << "\n";
        }
      }
      return 0;
    }

    if (*rank_cmd) {
      const auto formulas = read_formulas(formula_list);
      RankOutcome outcome;
      if (skip_voltage) {
        outcome = rank_without_voltage(formulas, config.metrics.valences, config.session);
      } else {
        auto backend = make_backend(config);
        ComparatorCache cache;
        outcome = rank_candidates(formulas, *backend, cache, config.metrics.valences, config.session);
      }
      if (g.json) {
        out << rank_json(outcome).dump() << "\n";
      } else {
        for (const auto& x : outcome.excluded) out << "excluded " << x.formula.render() << ": " << x.reason << "\n";
        print_entries(out, "charge ranked", outcome.charge_ranked);
        print_entries(out, "complexity filtered", outcome.complexity_filtered);
        if (!skip_voltage) print_entries(out, "voltage ordered", outcome.voltage_ordered);
      }
      return 0;
    }

    if (*explore_cmd) {
      SessionConfig sc = config.session;
      if (k_opt) sc.k = *k_opt;
      if (cycles_opt) sc.cycles = *cycles_opt;
      if (trees_opt) sc.trees = *trees_opt;
      const Formula seed = Formula::parse(seed_text);
      std::vector<CandidateRecord> output;
      SessionState state;
      std::vector<Event> events;
      if (!g.data_dir.empty() || !g.config.empty()) {
        SessionStore store(config);
        store.recover();
        const auto id = store.create(sc, seed);
        output = store.explore(id);
        auto api = store.get(id);
        state = api->session->snapshot();
        events = api->session->events_after(0);
      } else {
        auto snapshot = load_configured_snapshot(config);
        auto registry = make_registry(config);
        auto backend = make_backend(config);
        auto session = start_session("cli", sc, seed, config.make_clock());
        output = run_exploration(*session, ExplorationContext{*backend, *snapshot, *registry, config.metrics.weights});
        state = session->snapshot();
        events = session->events_after(0);
      }
      if (!events_out.empty()) {
        std::ofstream ev(events_out, std::ios::binary | std::ios::trunc);
        for (const auto& e : events) ev << to_line(e) << "\n";
        if (!ev) throw Error(ErrorKind::FileUnreadable, "cannot write " + events_out);
      }
      if (g.json) {
        auto list = nlohmann::json::array();
        for (const auto& c : output) list.push_back(to_json(c));
        out << nlohmann::json{{"session", state.summary()}, {"candidates", list}}.dump() << "\n";
      } else {
        out << output.size() << " candidates (" << state.candidates.size() << " evaluated, "
            << state.config.expected_candidates() << " expected)\n";
        for (const auto& c : output) {
          out << "  " << pad(std::to_string(c.index), 6) << pad(c.formula.render(), 44) << pad(fixed(c.capacity, 2), 10)
              << "tree " << c.tree + 1 << " cycle " << c.cycle << "\n";
        }
      }
      return 0;
    }

    if (*serve_cmd) {
      EngineConfig sc = config;
      if (!listen.empty()) {
        const auto colon = listen.rfind(':');
        if (colon == std::string::npos) throw Error(ErrorKind::ConfigInvalid, "--listen expects host:port");
        sc.listen_host = listen.substr(0, colon);
        try {
          sc.listen_port = std::stoi(listen.substr(colon + 1));
        } catch (const std::exception&) {
          throw Error(ErrorKind::ConfigInvalid, "bad port in --listen");
        }
      }
      SessionStore store(sc);
      const auto recovered = store.recover();
      for (const auto& w : store.warnings()) err << "warning: " << w << "\n";
      ApiServer server(store);
      const int port = server.bind(sc.listen_host, sc.listen_port);
      err << "listening on " << sc.listen_host << ":" << port << " (" << recovered.size()
          << " sessions recovered)" << std::endl;
      g_server = &server;
      auto previous_int = std::signal(SIGINT, handle_signal);
      auto previous_term = std::signal(SIGTERM, handle_signal);
      server.run();
      std::signal(SIGINT, previous_int);
      std::signal(SIGTERM, previous_term);
      g_server = nullptr;
      err << "stopped" << std::endl;
      return 0;
    }
  } catch (const RankingInterrupted& e) {
    err << "error: " << e.what() << "\n";
    if (g.json) out << nlohmann::json{{"error", to_string(e.kind())}, {"partial", to_json(e.partial())}}.dump() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace cathode
