// vl: operator CLI for the vector search service.
//
// Talks to a running service over HTTP (VL_ENDPOINT / --endpoint), or with
// --local runs the same API in-process against a snapshot file.

#include <charconv>
#include <csignal>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "vl/config.hpp"
#include "vl/http_server.hpp"
#include "vl/json_codec.hpp"
#include "vl/service.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitApiError = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConnectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Transport = std::function<vl::ApiResponse(const vl::ApiRequest&)>;

Transport http_transport(const std::string& endpoint) {
  return [endpoint](const vl::ApiRequest& req) {
    const auto scheme_end = endpoint.find("://");
    const auto path_start = endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    const std::string origin = endpoint.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

    httplib::Client client(origin);
    client.set_read_timeout(60, 0);
    httplib::Params params(req.query.begin(), req.query.end());
    const std::string path = httplib::append_query_params(prefix + req.path, params);

    httplib::Result res;
    if (req.method == "GET") {
      res = client.Get(path);
    } else if (req.method == "DELETE") {
      res = client.Delete(path);
    } else {
      res = client.Post(path, req.body, req.content_type);
    }
    if (!res) {
      throw ConnectionError("cannot reach service at " + endpoint + ": " + httplib::to_string(res.error()));
    }
    return vl::ApiResponse{res->status, res->body, res->get_header_value("Content-Type")};
  };
}

/// "text:weight", or bare "text" for weight 1. Splits at the last colon, and
/// only when what follows it is a number, so "ratio 16:9 screen" stays whole.
vl::QueryTerm parse_term(const std::string& raw, vl::Polarity polarity) {
  const std::string example = polarity == vl::Polarity::kMore ? "--term \"dining chair:1.0\""
                                                              : "--less \"upholstery:1.1\"";
  const auto colon = raw.rfind(':');
  if (colon != std::string::npos) {
    const std::string weight_text = raw.substr(colon + 1);
    double weight = 0.0;
    const auto [ptr, ec] = std::from_chars(weight_text.data(), weight_text.data() + weight_text.size(), weight);
    if (ec == std::errc{} && ptr == weight_text.data() + weight_text.size()) {
      if (colon == 0) throw UsageError("malformed term '" + raw + "': empty text, e.g. " + example);
      return {raw.substr(0, colon), weight, polarity};
    }
  }
  if (raw.find_first_not_of(" \t") == std::string::npos) {
    throw UsageError("malformed term '" + raw + "': empty text, e.g. " + example);
  }
  return {raw, 1.0, polarity};
}

vl::ContextItem parse_context(const std::string& raw) {
  const auto colon = raw.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw UsageError("malformed context '" + raw + "': expected DOC:WEIGHT, e.g. --context doc42:1.0");
  }
  const std::string weight_text = raw.substr(colon + 1);
  double weight = 0.0;
  const auto [ptr, ec] = std::from_chars(weight_text.data(), weight_text.data() + weight_text.size(), weight);
  if (ec != std::errc{} || ptr != weight_text.data() + weight_text.size()) {
    throw UsageError("malformed context weight in '" + raw + "'");
  }
  return {raw.substr(0, colon), std::nullopt, weight};
}

void print_hits(const vl::Json& hits) {
  if (hits.empty()) {
    std::cout << "(no results)\n";
    return;
  }
  std::cout << std::left << std::setw(6) << "rank" << std::setw(12) << "score" << "id\n";
  for (const auto& hit : hits) {
    std::ostringstream score;
    score << std::fixed << std::setprecision(6) << hit["score"].get<double>();
    std::cout << std::left << std::setw(6) << hit["rank"].get<std::size_t>() << std::setw(12)
              << score.str() << hit["id"].get<std::string>() << '\n';
  }
}

void print_tree_children(const vl::Json& node, const std::string& prefix) {
  const auto& children = node["children"];
  for (std::size_t i = 0; i < children.size(); ++i) {
    const bool last = i + 1 == children.size();
    std::cout << prefix << (last ? "└── " : "├── ") << children[i].value("doc_id", "?") << '\n';
    print_tree_children(children[i], prefix + (last ? "    " : "│   "));
  }
}

void print_tree(const vl::Json& tree) {
  std::cout << (tree.contains("doc_id") ? tree["doc_id"].get<std::string>() : std::string("(query)")) << '\n';
  print_tree_children(tree, "");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int report_error(const vl::ApiResponse& res) {
  std::string message = res.body;
  try {
    message = vl::Json::parse(res.body)["error"]["message"].get<std::string>();
  } catch (const std::exception&) {
  }
  std::cerr << "error (HTTP " << res.status << "): " << message << '\n';
  return kExitApiError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vl - multimodal vector search and recommendation"};
  app.require_subcommand(1);

  std::string endpoint = vl::process_env("VL_ENDPOINT").value_or("http://127.0.0.1:8080");
  std::optional<std::string> local_snapshot;
  std::optional<std::string> config_path;
  bool json_output = false;
  app.add_option("--endpoint", endpoint, "Service address (env VL_ENDPOINT)");
  app.add_option("--local", local_snapshot, "Run in-process against this snapshot file");
  app.add_option("--config", config_path, "JSON settings file (VL_* env vars override it)");
  app.add_flag("--json", json_output, "Print the raw service response");

  auto* ingest = app.add_subcommand("ingest", "Ingest a JSONL corpus");
  std::string ingest_file;
  bool embed_missing = false;
  ingest->add_option("file", ingest_file, "JSONL file, one document per line")->required();
  ingest->add_flag("--embed-missing", embed_missing, "Embed documents that carry no vector");

  auto* search = app.add_subcommand("search", "Run a composite query");
  std::vector<std::string> more_terms, less_terms, contexts, filters;
  std::optional<std::string> template_id;
  bool demote_quality = false;
  bool debug = false;
  std::size_t k = vl::kDefaultK;
  search->add_option("--term", more_terms, "More-of-this term as text[:weight], weight 1 by default")->required();
  search->add_option("--less", less_terms, "Less-of-this term as text[:weight], weight 1 by default");
  search->add_option("--template", template_id, "Semantic filter template id");
  search->add_option("--context", contexts, "Context document as DOC:WEIGHT");
  search->add_option("--filter", filters, "Metadata equality filter key=value");
  search->add_flag("--demote-quality", demote_quality, "Push low-quality imagery down");
  search->add_flag("--debug", debug, "Include the compiled-query trace");
  search->add_option("-k", k, "Number of hits")->check(CLI::Range(std::size_t{1}, vl::kMaxK));

  auto* walk = app.add_subcommand("walk", "Random recommendation walk");
  std::optional<std::string> start_doc, start_query;
  std::optional<std::size_t> layers, children, neighbours;
  std::optional<std::uint64_t> seed;
  bool literal = false;
  std::string format = "tree";
  auto* start_opt = walk->add_option("--start", start_doc, "Start document id");
  walk->add_option("--query", start_query, "Start from a text query")->excludes(start_opt);
  walk->add_option("--layers", layers, "Layers L (root is layer 1)");
  walk->add_option("--children", children, "Max children per node C");
  walk->add_option("--neighbours", neighbours, "Neighbours k per expansion");
  walk->add_option("--seed", seed, "Random seed");
  walk->add_flag("--literal-filtering", literal, "Filter visited items after retrieval");
  walk->add_option("--format", format, "tree, flat or json")
      ->check(CLI::IsMember({"tree", "flat", "json"}));

  auto* snapshot = app.add_subcommand("snapshot", "Write the index to a JSONL snapshot");
  std::string snapshot_out;
  snapshot->add_option("out", snapshot_out)->required();

  auto* restore = app.add_subcommand("restore", "Replace the index with a snapshot");
  std::string restore_in;
  restore->add_option("in", restore_in)->required();

  auto* get = app.add_subcommand("get", "Show a document");
  std::string get_id;
  get->add_option("id", get_id)->required();

  auto* templates = app.add_subcommand("templates", "List semantic filter templates");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::optional<std::string> bind_host;
  std::optional<int> port;
  serve->add_option("--bind", bind_host, "Bind address");
  serve->add_option("--port", port, "Port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    vl::ServiceConfig config = vl::load_config(config_path);

    if (serve->parsed()) {
      if (bind_host) config.bind_host = *bind_host;
      if (port) config.port = *port;
      if (local_snapshot) config.snapshot_path = *local_snapshot;
      vl::Service service(config);
      vl::HttpServer server(service);
      const int bound = server.bind(config.bind_host, config.port);
      if (bound < 0) {
        std::cerr << "cannot bind " << config.bind_host << ":" << config.port << '\n';
        return kExitApiError;
      }
      std::cerr << "vl listening on " << config.bind_host << ":" << bound << " (dimension "
                << service.index().dimension() << ", " << service.index().count() << " documents)\n";
      server.serve();
      return kExitOk;
    }

    std::unique_ptr<vl::Service> local;
    Transport transport;
    if (local_snapshot) {
      config.snapshot_path = *local_snapshot;
      local = std::make_unique<vl::Service>(config);
      transport = [&local](const vl::ApiRequest& req) { return local->handle(req); };
    } else {
      transport = http_transport(endpoint);
    }

    vl::ApiRequest request;
    if (ingest->parsed()) {
      request = {"POST", "/v1/documents", {{"embed_missing", embed_missing ? "1" : "0"}},
                 read_file(ingest_file), "application/x-ndjson"};
    } else if (search->parsed()) {
      vl::QuerySpec spec;
      for (const auto& t : more_terms) spec.terms.push_back(parse_term(t, vl::Polarity::kMore));
      for (const auto& t : less_terms) spec.terms.push_back(parse_term(t, vl::Polarity::kLess));
      for (const auto& c : contexts) spec.context_items.push_back(parse_context(c));
      for (const auto& f : filters) {
        const auto eq = f.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("malformed filter '" + f + "': expected key=value");
        spec.filter.emplace_back(f.substr(0, eq), f.substr(eq + 1));
      }
      spec.template_id = template_id;
      spec.demote_quality = demote_quality;
      spec.k = k;
      request = {"POST", "/v1/search", {}, vl::dump(vl::to_json(spec)), "application/json"};
      if (debug) request.query["debug"] = "1";
    } else if (walk->parsed()) {
      if (!start_doc && !start_query) throw UsageError("walk needs --start DOC or --query TEXT");
      vl::Json start;
      if (start_doc) {
        start = {{"doc_id", *start_doc}};
      } else {
        vl::QuerySpec spec;
        spec.terms.push_back({*start_query, 1.0, vl::Polarity::kMore});
        start = {{"query_spec", vl::to_json(spec)}};
      }
      vl::Json params = vl::Json::object();
      if (layers) params["layers"] = *layers;
      if (children) params["children"] = *children;
      if (neighbours) params["neighbours"] = *neighbours;
      if (seed) params["seed"] = *seed;
      if (literal) params["literal_filtering"] = true;
      request = {"POST", "/v1/walk", {}, vl::dump({{"start", start}, {"params", params}}), "application/json"};
    } else if (snapshot->parsed()) {
      request = {"GET", "/v1/admin/snapshot", {}, "", "application/json"};
    } else if (restore->parsed()) {
      request = {"POST", "/v1/admin/restore", {}, read_file(restore_in), "application/x-ndjson"};
    } else if (get->parsed()) {
      request = {"GET", "/v1/documents/" + get_id, {}, "", "application/json"};
    } else if (templates->parsed()) {
      request = {"GET", "/v1/templates", {}, "", "application/json"};
    }

    const vl::ApiResponse res = transport(request);
    if (res.status < 200 || res.status >= 300) return report_error(res);

    if (snapshot->parsed()) {
      std::ofstream out(snapshot_out, std::ios::binary | std::ios::trunc);
      out << res.body;
      if (!out) throw UsageError("cannot write " + snapshot_out);
      if (json_output) std::cout << res.body;
      return kExitOk;
    }
    if (json_output || (walk->parsed() && format == "json")) {
      std::cout << res.body;
      return kExitOk;
    }

    const vl::Json body = vl::Json::parse(res.body);
    if (search->parsed()) {
      print_hits(body["hits"]);
      if (body.contains("trace")) {
        std::cout << "\ncompiled from:\n";
        for (const auto& entry : body["trace"]["terms"]) {
          std::cout << "  " << std::showpos << std::fixed << std::setprecision(3)
                    << entry["weight"].get<double>() << std::noshowpos << "  "
                    << entry["source"].get<std::string>() << "  " << entry["text"].get<std::string>() << '\n';
        }
      }
    } else if (walk->parsed()) {
      if (format == "flat") {
        for (const auto& id : body["flat"]) std::cout << id.get<std::string>() << '\n';
      } else {
        print_tree(body["tree"]);
      }
    } else if (ingest->parsed()) {
      std::cout << "ingested " << body["ingested"] << ", skipped " << body["skipped"] << '\n';
      for (const auto& e : body["errors"]) {
        std::cout << "  line " << e["line"] << ": " << e["code"].get<std::string>() << ": "
                  << e["message"].get<std::string>() << '\n';
      }
    } else if (restore->parsed()) {
      std::cout << "restored " << body["restored"] << " documents\n";
    } else if (templates->parsed()) {
      for (const auto& tpl : body) {
        std::cout << std::left << std::setw(14) << tpl["id"].get<std::string>() << tpl["pattern"].get<std::string>()
                  << '\n';
      }
    } else {
      std::cout << body.dump(2) << '\n';
    }
    return kExitOk;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConnectionError& e) {
    std::cerr << e.what() << '\n';
    return kExitApiError;
  } catch (const vl::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitApiError;
  }
}
