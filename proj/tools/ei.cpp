// Command-line entry point: run the interview service, export stored
// sessions, and analyze an export.

#include <csignal>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>

#include "ei/analytics.hpp"
#include "ei/service.hpp"
#include "ei/store.hpp"

namespace {

httplib::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

struct ServeOptions {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::string data_path = "sessions.jsonl";
  std::string lexicon_path = std::string(EI_DATA_DIR) + "/lexicon.txt";
  std::string reflections_path = std::string(EI_DATA_DIR) + "/reflections.txt";
  std::string resources_path = std::string(EI_DATA_DIR) + "/resources.txt";
  std::string static_dir;
};

int run_serve(const ServeOptions& o) {
  const auto content =
      ei::InterviewContent::load(o.lexicon_path, o.reflections_path, o.resources_path);
  ei::FileSessionStore store(o.data_path);
  ei::Service service(content, store);

  httplib::Server server;
  service.mount(server);
  if (!o.static_dir.empty() && !server.set_mount_point("/", o.static_dir)) {
    std::cerr << "static directory '" << o.static_dir << "' does not exist\n";
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "lexicon " << content.lexicon.version() << ", store " << o.data_path
            << ", listening on " << o.host << ":" << o.port << "\n";
  if (!server.listen(o.host, o.port)) {
    std::cerr << "cannot listen on " << o.host << ":" << o.port << "\n";
    return 1;
  }
  return 0;
}

int run_export(const std::string& data_path, const std::string& out_path, bool completed_only) {
  ei::FileSessionStore store(data_path);
  const auto records = store.export_sessions(completed_only);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "cannot write '" << out_path << "'\n";
    return 1;
  }
  ei::write_export(out, records);
  std::cerr << "exported " << records.size() << " sessions\n";
  return out ? 0 : 1;
}

int run_analyze(const std::string& input, const std::string& out_path, const std::string& format,
                std::uint64_t seed, std::size_t permutations) {
  std::ifstream in(input, std::ios::binary);
  if (!in) {
    std::cerr << "cannot read '" << input << "'\n";
    return 1;
  }
  const auto corpus = ei::read_export(in);
  ei::ReportOptions options;
  options.spearman.seed = seed;
  options.spearman.permutations = permutations;
  auto report = ei::build_analytics_report(corpus.records, options);
  report.skipped_corrupt += corpus.corrupt_lines;
  if (report.skipped_corrupt > 0) {
    std::cerr << "warning: skipped " << report.skipped_corrupt << " corrupt records\n";
  }

  const std::string text = format == "json" ? ei::analytics_to_json(report).dump(2) + "\n"
                                            : ei::analytics_to_table(report);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "cannot write '" << out_path << "'\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expressive interviewing service and analysis tools"};
  app.require_subcommand(1);

  ServeOptions serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the interview HTTP service");
  serve_cmd->add_option("--host", serve.host, "Address to bind")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port to listen on")
      ->envname("PORT")
      ->capture_default_str();
  serve_cmd->add_option("--data", serve.data_path, "Session store file")
      ->envname("DATA_PATH")
      ->capture_default_str();
  serve_cmd->add_option("--lexicon", serve.lexicon_path, "Lexicon file")
      ->envname("LEXICON_PATH")
      ->capture_default_str();
  serve_cmd->add_option("--reflections", serve.reflections_path, "Prompts and reflections file")
      ->envname("REFLECTIONS_PATH")
      ->capture_default_str();
  serve_cmd->add_option("--resources", serve.resources_path, "Resource links file")
      ->envname("RESOURCES_PATH")
      ->capture_default_str();
  serve_cmd->add_option("--static", serve.static_dir, "Directory with the built web UI")
      ->envname("STATIC_DIR");

  std::string export_data = "sessions.jsonl";
  std::string export_out;
  bool completed_only = false;
  auto* export_cmd = app.add_subcommand("export", "Write stored sessions as an export file");
  export_cmd->add_option("--data", export_data, "Session store file")
      ->envname("DATA_PATH")
      ->capture_default_str();
  export_cmd->add_option("--out", export_out, "Export file to write")->required();
  export_cmd->add_flag("--completed-only", completed_only, "Only sessions that reached feedback");

  std::string input;
  std::string out_path;
  std::string format = "table";
  std::uint64_t seed = ei::SpearmanOptions{}.seed;
  std::size_t permutations = ei::SpearmanOptions{}.permutations;
  auto* analyze_cmd = app.add_subcommand("analyze", "Correlation and engagement report");
  analyze_cmd->add_option("--input", input, "Export file")->required();
  analyze_cmd->add_option("--out", out_path, "Report file ('-' for stdout)")->required();
  analyze_cmd->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
  analyze_cmd->add_option("--seed", seed, "Permutation test seed")->capture_default_str();
  analyze_cmd->add_option("--permutations", permutations, "Permutations per test")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return run_serve(serve);
    if (*export_cmd) return run_export(export_data, export_out, completed_only);
    if (*analyze_cmd) return run_analyze(input, out_path, format, seed, permutations);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
