#include "assaykg/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "assaykg/compare.hpp"
#include "assaykg/error.hpp"
#include "assaykg/ntriples.hpp"
#include "assaykg/service.hpp"
#include "assaykg/snapshot.hpp"

namespace assaykg {

namespace {

using ojson = nlohmann::ordered_json;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void print_error(std::ostream& err, std::string_view code, std::string_view message) {
  ojson line = {{"error", {{"code", code}, {"message", message}}}};
  err << line.dump() << "\n";
}

Store open_store(const std::string& path) {
  if (!std::filesystem::exists(path)) return Store{};
  return load_snapshot(path);
}

std::string read_text(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
  }
  return read_file(path);
}

extern "C" void handle_stop_signal(int) { stop_server(); }

struct Options {
  std::string store;

  std::string corpus_path;

  bool stats_json = false;
  bool stats_labels = false;

  std::size_t min_frequency = 1;
  std::uint64_t seed = 0;
  double calibration_split = 0.2;
  std::string timestamp;

  std::string text_file;
  bool from_stdin = false;
  std::string assay_id;
  std::string title;
  std::string paper_title;
  std::size_t top_k = 10;
  bool auto_accept = false;

  std::string session_id;
  std::string decisions_path;

  std::vector<std::string> ids;
  std::string format = "text";

  std::string similar_id;
  std::size_t k = 5;
  std::string mode = "statements";
  bool similar_json = false;

  std::string ntriples_path;
  std::string base_uri{kDefaultBaseUri};
  bool partial = false;

  std::string snapshot_path;

  double split = 0.2;
  bool eval_json = false;

  std::string host = "127.0.0.1";
  int port = 8080;
  double flush_seconds = 5.0;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            std::istream& in) {
  CLI::App app{"Bioassay knowledge graph: ingest, semantify, curate, compare"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  if (const char* env = std::getenv(kStoreEnv)) {
    o.store = env;
  } else {
    o.store = kDefaultStorePath;
  }
  app.add_option("--store", o.store, "Store snapshot path (default $ASSAYKG_STORE)");

  auto* ingest_cmd = app.add_subcommand("ingest", "Ingest an annotated JSON Lines corpus");
  ingest_cmd->add_option("corpus", o.corpus_path)->required();

  auto* stats_cmd = app.add_subcommand("stats", "Profile the graph's contributions");
  stats_cmd->add_flag("--json", o.stats_json);
  stats_cmd->add_flag("--labels", o.stats_labels, "Also list label frequencies");

  auto* train_cmd = app.add_subcommand("train", "Train the semantifier on the corpus");
  train_cmd->add_option("--min-freq", o.min_frequency)->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", o.seed);
  train_cmd->add_option("--calibration-split", o.calibration_split)->check(CLI::Range(0.0, 0.99));
  train_cmd->add_option("--timestamp", o.timestamp, "Recorded training time (default now)");

  auto* semantify_cmd = app.add_subcommand("semantify", "Propose statements for assay text");
  auto* text_opt = semantify_cmd->add_option("--text-file", o.text_file);
  auto* stdin_opt = semantify_cmd->add_flag("--stdin", o.from_stdin);
  auto* assay_opt = semantify_cmd->add_option("--assay", o.assay_id, "Existing assay id");
  text_opt->excludes(stdin_opt)->excludes(assay_opt);
  stdin_opt->excludes(assay_opt);
  semantify_cmd->add_option("--title", o.title);
  semantify_cmd->add_option("--top-k", o.top_k);
  semantify_cmd->add_flag("--auto-accept", o.auto_accept,
                          "Accept every proposal and finalize immediately");
  semantify_cmd->add_option("--paper-title", o.paper_title);

  auto* curate_cmd = app.add_subcommand("curate", "Apply a decisions file to a session");
  curate_cmd->add_option("session", o.session_id)->required();
  curate_cmd->add_option("--decisions", o.decisions_path)->required();

  auto* compare_cmd = app.add_subcommand("compare", "Tabulate contributions side by side");
  compare_cmd->add_option("ids", o.ids)->required();
  compare_cmd->add_option("--format", o.format)
      ->check(CLI::IsMember({"text", "csv", "json"}));

  auto* similar_cmd = app.add_subcommand("similar", "Nearest contributions by Jaccard");
  similar_cmd->add_option("id", o.similar_id)->required();
  similar_cmd->add_option("-k", o.k);
  similar_cmd->add_option("--mode", o.mode)
      ->check(CLI::IsMember({"statements", "properties"}));
  similar_cmd->add_flag("--json", o.similar_json);

  auto* export_cmd = app.add_subcommand("export", "Write the graph as N-Triples");
  export_cmd->add_option("--ntriples", o.ntriples_path)->required();
  export_cmd->add_option("--base-uri", o.base_uri);

  auto* import_cmd = app.add_subcommand("import", "Read N-Triples into the graph");
  import_cmd->add_option("--ntriples", o.ntriples_path)->required();
  import_cmd->add_option("--base-uri", o.base_uri);
  import_cmd->add_flag("--partial", o.partial, "Keep lines applied before an error");

  auto* save_cmd = app.add_subcommand("save", "Copy the store to a snapshot");
  save_cmd->add_option("snapshot", o.snapshot_path)->required();
  auto* load_cmd = app.add_subcommand("load", "Replace the store with a snapshot");
  load_cmd->add_option("snapshot", o.snapshot_path)->required();

  auto* eval_cmd = app.add_subcommand("eval", "Holdout evaluation on the corpus");
  eval_cmd->add_option("--split", o.split)->check(CLI::Range(0.0, 0.99));
  eval_cmd->add_option("--seed", o.seed);
  eval_cmd->add_option("--min-freq", o.min_frequency)->check(CLI::PositiveNumber);
  eval_cmd->add_option("--calibration-split", o.calibration_split)->check(CLI::Range(0.0, 0.99));
  eval_cmd->add_flag("--json", o.eval_json);

  auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API");
  serve_cmd->add_option("--host", o.host);
  serve_cmd->add_option("--port", o.port)->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--flush-interval", o.flush_seconds, "Seconds between flushes")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "UsageError", e.what());
    return 2;
  }

  try {
    if (semantify_cmd->parsed() && o.text_file.empty() && !o.from_stdin &&
        o.assay_id.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "semantify needs --text-file, --stdin or --assay");
    }

    if (load_cmd->parsed()) {
      Store store = load_snapshot(o.snapshot_path);
      const auto checksum = save_snapshot(store, o.store);
      out << "loaded " << o.snapshot_path << " into " << o.store << " sha256 " << checksum
          << "\n";
      return 0;
    }

    Store store = open_store(o.store);
    auto persist = [&] { save_snapshot(store, o.store); };

    if (ingest_cmd->parsed()) {
      auto parsed = parse_corpus_file(o.corpus_path);
      for (const auto& w : parsed.warnings) {
        err << "warning: line " << w.line << ": " << w.message << "\n";
      }
      auto report = ingest(store, parsed.assays);
      persist();
      out << "ingested " << report.assays << " assays (" << report.replaced
          << " replaced), " << report.statements_added << " statements added\n";
      for (const auto& [id, c] : report.contributions) out << id << "\t" << c.str() << "\n";
    } else if (stats_cmd->parsed()) {
      const auto stats = graph_profile(store.graph);
      if (o.stats_json) {
        out << stats_view_json(stats) << "\n";
      } else {
        out << "assays " << stats.assay_count << "\n";
        out << "statements min "
            << (stats.statements_min ? std::to_string(*stats.statements_min) : "-") << "\n";
        out << "statements max "
            << (stats.statements_max ? std::to_string(*stats.statements_max) : "-") << "\n";
        out << "statements mean " << fixed(stats.statements_mean, 1) << "\n";
        out << "statements total " << stats.statements_total << "\n";
        out << "distinct types " << stats.distinct_types << "\n";
        out << "distinct formats " << stats.distinct_formats << "\n";
        if (o.stats_labels) {
          std::vector<std::pair<std::string, std::size_t>> labels(
              stats.per_label_frequency.begin(), stats.per_label_frequency.end());
          std::stable_sort(labels.begin(), labels.end(),
                           [](const auto& a, const auto& b) { return a.second > b.second; });
          for (const auto& [label, count] : labels) out << count << "\t" << label << "\n";
        }
      }
    } else if (train_cmd->parsed()) {
      TrainConfig config;
      config.seed = o.seed;
      config.calibration_split = o.calibration_split;
      config.timestamp = o.timestamp.empty() ? iso_timestamp(system_clock_ms()) : o.timestamp;
      std::vector<std::string> warnings;
      auto model = train_store_model(store, o.store, o.min_frequency, config, &warnings);
      persist();
      for (const auto& w : warnings) err << "warning: " << w << "\n";
      out << "trained " << model.label_space().size() << " labels over "
          << model.vocabulary().size() << " tokens (" << model.metadata().training_size
          << " training, " << model.metadata().calibration_size << " calibration)\n";
      out << "model " << store.model->path << " sha256 " << store.model->checksum << "\n";
    } else if (semantify_cmd->parsed()) {
      auto model = load_store_model(store);
      if (!model) throw Error(ErrorCode::kModelUnavailable, "no trained model; run train");
      std::string assay_id = o.assay_id;
      if (assay_id.empty()) {
        std::string text = o.from_stdin ? read_text("-", in) : read_text(o.text_file, in);
        std::optional<std::string> title;
        if (!o.title.empty()) title = o.title;
        assay_id = submit_assay(store, title, std::move(text));
      }
      auto& session = semantify(store, assay_id, *model, o.top_k);
      const std::string session_id = session.id();
      if (o.auto_accept) {
        std::string paper_title = o.paper_title;
        if (paper_title.empty()) paper_title = o.title.empty() ? assay_id : o.title;
        auto result = auto_accept(store, session_id, paper_title);
        for (const auto& w : result.warnings) err << "warning: " << w << "\n";
      }
      persist();
      out << session_view_json(find_session(store, session_id)) << "\n";
    } else if (curate_cmd->parsed()) {
      std::ifstream file(o.decisions_path);
      if (!file) throw Error(ErrorCode::kIoFailure, "cannot read " + o.decisions_path);
      auto commands = parse_decisions(file);
      auto result = apply_decisions(store, o.session_id, commands);
      persist();
      if (result) {
        for (const auto& w : result->warnings) err << "warning: " << w << "\n";
      }
      out << session_view_json(find_session(store, o.session_id)) << "\n";
    } else if (compare_cmd->parsed()) {
      std::vector<NodeId> ids;
      for (const auto& ref : o.ids) {
        auto id = resolve_contribution(store, ref);
        if (!id) throw Error(ErrorCode::kUnknownContribution, "unknown contribution " + ref);
        ids.push_back(*id);
      }
      auto table = build_comparison(store.graph, ids);
      if (o.format == "csv") {
        out << render_csv(table);
      } else if (o.format == "json") {
        out << render_json(table) << "\n";
      } else {
        out << render_text(table);
      }
    } else if (similar_cmd->parsed()) {
      auto id = resolve_contribution(store, o.similar_id);
      if (!id) throw Error(ErrorCode::kUnknownAssay, "no contribution for " + o.similar_id);
      const auto mode =
          o.mode == "properties" ? SimilarityMode::kProperties : SimilarityMode::kStatements;
      auto results = find_similar(store.graph, *id, o.k, mode);
      if (o.similar_json) {
        ojson arr = ojson::array();
        for (const auto& r : results) {
          arr.push_back({{"contribution_id", r.contribution.str()}, {"score", r.score}});
        }
        out << ojson{{"query", id->str()}, {"results", arr}}.dump() << "\n";
      } else {
        for (const auto& r : results) {
          out << r.contribution.str() << "\t" << fixed(r.score, 6) << "\t"
              << store.graph.find_contribution(r.contribution)->label << "\n";
        }
      }
    } else if (export_cmd->parsed()) {
      auto text = export_ntriples(store.graph, o.base_uri);
      if (o.ntriples_path == "-") {
        out << text;
      } else {
        write_file_atomic(o.ntriples_path, text);
      }
    } else if (import_cmd->parsed()) {
      std::ifstream file(o.ntriples_path);
      if (!file) throw Error(ErrorCode::kIoFailure, "cannot read " + o.ntriples_path);
      ImportOptions options;
      options.partial_apply = o.partial;
      auto report = import_ntriples(store.graph, file, o.base_uri, options);
      persist();
      for (const auto& w : report.warnings) err << "warning: " << w << "\n";
      out << "imported " << report.triples << " triples, " << report.new_statements
          << " new statements, " << report.duplicate_statements << " duplicates\n";
      if (report.error) {
        print_error(err, "ParseError", *report.error);
        return 1;
      }
    } else if (save_cmd->parsed()) {
      out << "sha256 " << save_snapshot(store, o.snapshot_path) << "\n";
    } else if (eval_cmd->parsed()) {
      TrainConfig config;
      config.seed = o.seed;
      config.calibration_split = o.calibration_split;
      auto result = evaluate_holdout(store.corpus, o.split, o.min_frequency, config);
      const auto& r = result.report;
      if (o.eval_json) {
        ojson j = {{"train_size", result.train_size},
                   {"test_size", result.test_size},
                   {"labels", result.label_count},
                   {"micro", {{"precision", r.micro.precision},
                              {"recall", r.micro.recall},
                              {"f1", r.micro.f1},
                              {"true_positives", r.micro.true_positives},
                              {"predicted", r.micro.predicted},
                              {"gold", r.micro.gold}}},
                   {"macro", {{"precision", r.macro_precision},
                              {"recall", r.macro_recall},
                              {"f1", r.macro_f1},
                              {"assays", r.macro_assays}}}};
        out << j.dump() << "\n";
      } else {
        out << "train " << result.train_size << " test " << result.test_size << " labels "
            << result.label_count << "\n";
        out << "micro precision " << fixed(r.micro.precision, 4) << " recall "
            << fixed(r.micro.recall, 4) << " f1 " << fixed(r.micro.f1, 4) << " ("
            << r.micro.true_positives << "/" << r.micro.predicted << " predicted, "
            << r.micro.gold << " gold)\n";
        out << "macro precision " << fixed(r.macro_precision, 4) << " recall "
            << fixed(r.macro_recall, 4) << " f1 " << fixed(r.macro_f1, 4) << " over "
            << r.macro_assays << " assays\n";
      }
    } else if (serve_cmd->parsed()) {
      Service service(std::move(store), o.store);
      std::signal(SIGINT, handle_stop_signal);
      std::signal(SIGTERM, handle_stop_signal);
      err << "serving on " << o.host << ":" << o.port << "\n";
      serve_http(service, o.host, o.port,
                 std::chrono::milliseconds(static_cast<long>(o.flush_seconds * 1000)));
    }
  } catch (const Error& e) {
    print_error(err, e.code_name(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(err, "InternalError", e.what());
    return 1;
  }
  return 0;
}

}  // namespace assaykg
