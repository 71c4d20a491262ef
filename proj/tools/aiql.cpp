// aiql: load corpora, run queries, explain plans, generate synthetic data.

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "aiql/anomaly.hpp"
#include "aiql/engine.hpp"
#include "aiql/generate.hpp"
#include "aiql/parser.hpp"
#include "aiql/render.hpp"

namespace {

enum Exit { kOk = 0, kIo = 1, kQuery = 2, kResource = 3 };

constexpr const char* kSnapshotName = "store.aiqs";

struct RunConfig {
    std::string data_dir;
    std::string scheduler = "relationship";
    std::size_t workers = 1;
    std::string format = "table";
    std::int64_t group_size = 1;
    std::uint64_t seed = 42;
    bool explain = false;
};

std::string default_data_dir() {
    const char* env = std::getenv("AIQL_DATA_DIR");
    return env && *env ? env : ".";
}

aiql::EngineOptions engine_options(const RunConfig& cfg) {
    aiql::EngineOptions o;
    o.scheduler = cfg.scheduler == "fetch-filter" ? aiql::SchedulerKind::fetch_filter : aiql::SchedulerKind::relationship;
    o.workers = cfg.workers;
    return o;
}

int report_query_error(const aiql::QueryError& e) {
    std::cerr << "error: " << e.kind() << " error at " << aiql::to_string(e.span().begin) << ": " << e.what() << "\n";
    return kQuery;
}

/// Parses and runs (or explains) one query, writing to `out`.
int run_text(const std::string& text, const RunConfig& cfg, const aiql::Store* store, std::ostream& out,
             aiql::ResultTable* last = nullptr) {
    try {
        aiql::QueryContext ctx = aiql::parse(text);
        if (cfg.explain) {
            out << aiql::explain(ctx, engine_options(cfg));
            return kOk;
        }
        if (!store) {
            std::cerr << "error: no store loaded\n";
            return kIo;
        }
        aiql::ResultTable table = aiql::run_query(*store, ctx, engine_options(cfg));
        out << aiql::render(table, *aiql::output_format_from_string(cfg.format));
        if (last) *last = std::move(table);
        return kOk;
    } catch (const aiql::QueryError& e) {
        return report_query_error(e);
    } catch (const aiql::ResourceError& e) {
        std::cerr << "error: resource limit: " << e.what() << "\n";
        return kResource;
    }
}

std::optional<aiql::Store> open_store(const RunConfig& cfg) {
    auto path = std::filesystem::path(cfg.data_dir) / kSnapshotName;
    try {
        return aiql::Store::load_snapshot(path);
    } catch (const aiql::StoreError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return std::nullopt;
    }
}

int cmd_load(const std::string& entities, const std::string& events, const RunConfig& cfg) {
    try {
        aiql::Store store(cfg.group_size);
        aiql::IngestStats stats = store.ingest(entities, events);
        std::filesystem::create_directories(cfg.data_dir);
        store.save_snapshot(std::filesystem::path(cfg.data_dir) / kSnapshotName);
        std::cout << "entities " << stats.entities << "\nevents " << stats.events << "\nrejected " << stats.rejected
                  << "\n";
        for (const auto& r : stats.rejections)
            std::cerr << "rejected " << r.source << ":" << r.line << ": " << r.reason << "\n";
        return kOk;
    } catch (const aiql::StoreError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
}

int cmd_query(const std::string& file, const std::string& inline_text, const RunConfig& cfg) {
    std::string text = inline_text;
    if (text.empty()) {
        if (file.empty()) {
            std::cerr << "error: give a query file or --execute\n";
            return kQuery;
        }
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot open " << file << "\n";
            return kIo;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    if (cfg.explain) return run_text(text, cfg, nullptr, std::cout);
    auto store = open_store(cfg);
    if (!store) return kIo;
    return run_text(text, cfg, &*store, std::cout);
}

int cmd_repl(RunConfig cfg) {
    auto store = open_store(cfg);
    if (!store) return kIo;
    const bool interactive = isatty(STDIN_FILENO);
    std::string buffer, line;
    aiql::ResultTable last;
    bool have_last = false;
    int status = kOk;
    auto flush = [&] {
        if (buffer.find_first_not_of(" \t\r\n") == std::string::npos) {
            buffer.clear();
            return;
        }
        aiql::ResultTable result;
        status = run_text(buffer, cfg, &*store, std::cout, &result);
        if (status == kOk && !cfg.explain) {
            last = std::move(result);
            have_last = true;
        }
        buffer.clear();
        std::cout.flush();
    };
    if (interactive) std::cout << "aiql> " << std::flush;
    while (std::getline(std::cin, line)) {
        if (buffer.empty() && !line.empty() && line.front() == '.') {
            std::istringstream words(line);
            std::string cmd, arg;
            words >> cmd >> arg;
            if (cmd == ".quit" || cmd == ".exit") return status;
            if (cmd == ".format" && aiql::output_format_from_string(arg)) cfg.format = arg;
            else if (cmd == ".explain") cfg.explain = arg != "off";
            else if (cmd == ".last" && have_last) std::cout << aiql::render(last, *aiql::output_format_from_string(cfg.format));
            else std::cerr << "commands: .format table|json|csv, .explain [off], .last, .quit\n";
        } else {
            auto end = line.find_last_not_of(" \t\r");
            bool terminated = end != std::string::npos && line[end] == ';';
            buffer += terminated ? line.substr(0, end) : line;
            buffer += '\n';
            if (terminated) flush();
        }
        if (interactive) std::cout << (buffer.empty() ? "aiql> " : "  ... ") << std::flush;
    }
    flush();
    return status;
}

int cmd_generate(const aiql::GenerateOptions& options, const std::string& out_dir) {
    try {
        aiql::Corpus corpus = aiql::generate(options);
        aiql::write_corpus(corpus, out_dir);
        std::cout << "entities " << corpus.entities.size() << "\nevents " << corpus.events.size() << "\n";
        return kOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kQuery;
    } catch (const aiql::StoreError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AIQL query engine for system-monitoring event data"};
    app.require_subcommand(1);
    RunConfig cfg;
    cfg.data_dir = default_data_dir();

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--data-dir", cfg.data_dir, "Store directory (default $AIQL_DATA_DIR or .)");
    };
    auto add_engine = [&](CLI::App* sub) {
        sub->add_option("--scheduler", cfg.scheduler)->check(CLI::IsMember({"relationship", "fetch-filter"}));
        sub->add_option("--workers", cfg.workers)->check(CLI::PositiveNumber);
        sub->add_option("--format", cfg.format)->check(CLI::IsMember({"table", "json", "csv"}));
    };

    std::string entities, events;
    auto* load = app.add_subcommand("load", "Ingest entity and event files into a snapshot");
    load->add_option("entities", entities)->required();
    load->add_option("events", events)->required();
    load->add_option("--group-size", cfg.group_size)->check(CLI::PositiveNumber);
    add_common(load);

    std::string query_file, inline_text;
    auto* query = app.add_subcommand("query", "Run a query file or inline query");
    query->add_option("file", query_file);
    query->add_option("-e,--execute", inline_text, "Query text");
    query->add_flag("--explain", cfg.explain, "Print the plan instead of executing");
    add_common(query);
    add_engine(query);

    auto* explain = app.add_subcommand("explain", "Print the execution plan of a query");
    explain->add_option("file", query_file);
    explain->add_option("-e,--execute", inline_text, "Query text");
    add_common(explain);
    add_engine(explain);

    auto* repl = app.add_subcommand("repl", "Interactive queries; end each with ';'");
    add_common(repl);
    add_engine(repl);

    aiql::GenerateOptions gen;
    std::string scenario, out_dir = ".";
    auto* generate = app.add_subcommand("generate", "Write a synthetic corpus with planted ground truth");
    generate->add_option("scenario", scenario)
        ->required()
        ->check(CLI::IsMember({"apt-chain", "dependency-chain", "netspike", "uniform"}));
    generate->add_option("--out", out_dir, "Output directory");
    generate->add_option("--seed", gen.seed);
    generate->add_option("--hosts", gen.hosts);
    generate->add_option("--noise", gen.noise_events, "Background events");
    generate->add_option("--processes", gen.processes_per_host);
    generate->add_option("--files", gen.files_per_host);
    generate->add_option("--ips", gen.ips_per_host);
    generate->add_option("--days", gen.days);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kQuery;
    }

    if (*load) return cmd_load(entities, events, cfg);
    if (*query) return cmd_query(query_file, inline_text, cfg);
    if (*explain) {
        cfg.explain = true;
        return cmd_query(query_file, inline_text, cfg);
    }
    if (*repl) return cmd_repl(cfg);
    if (*generate) {
        gen.scenario = *aiql::scenario_from_string(scenario);
        return cmd_generate(gen, out_dir);
    }
    return kOk;
}
