// Synthetic corpus generator.

#include "aiql/generate.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <stdexcept>

#include "aiql/errors.hpp"
#include "aiql/store.hpp"
#include "json.hpp"

namespace aiql {

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::apt_chain: return "apt-chain";
        case Scenario::dependency_chain: return "dependency-chain";
        case Scenario::netspike: return "netspike";
        case Scenario::uniform: return "uniform";
    }
    return "?";
}

std::optional<Scenario> scenario_from_string(std::string_view text) {
    for (auto s : {Scenario::apt_chain, Scenario::dependency_chain, Scenario::netspike, Scenario::uniform})
        if (to_string(s) == text) return s;
    return std::nullopt;
}

namespace {

class Builder {
public:
    explicit Builder(std::uint64_t seed) : rng_(seed) {}

    std::uint64_t below(std::uint64_t n) { return rng_() % n; }
    std::int64_t between(std::int64_t lo, std::int64_t hi) {  // [lo, hi)
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo)));
    }

    std::string process(std::int64_t agent, const std::string& exe, const std::string& user = "user") {
        std::string id = "a" + std::to_string(agent) + "-proc" + std::to_string(corpus.entities.size());
        Entity e{id, EntityKind::process, AgentId{agent}, {}};
        e.attrs["pid"] = static_cast<std::int64_t>(1000 + corpus.entities.size());
        e.attrs["name"] = exe;
        e.attrs["exe_name"] = exe;
        e.attrs["user"] = user;
        e.attrs["cmd"] = exe;
        corpus.entities.push_back(std::move(e));
        return id;
    }
    std::string file(std::int64_t agent, const std::string& name) {
        std::string id = "a" + std::to_string(agent) + "-file" + std::to_string(corpus.entities.size());
        Entity e{id, EntityKind::file, AgentId{agent}, {}};
        e.attrs["name"] = name;
        e.attrs["owner"] = "root";
        corpus.entities.push_back(std::move(e));
        return id;
    }
    std::string ip(std::int64_t agent, const std::string& dst) {
        std::string id = "a" + std::to_string(agent) + "-ip" + std::to_string(corpus.entities.size());
        Entity e{id, EntityKind::network, AgentId{agent}, {}};
        e.attrs["src_ip"] = "10.0." + std::to_string(agent) + ".1";
        e.attrs["dst_ip"] = dst;
        e.attrs["src_port"] = std::int64_t{40000};
        e.attrs["dst_port"] = std::int64_t{443};
        e.attrs["protocol"] = "tcp";
        corpus.entities.push_back(std::move(e));
        return id;
    }
    std::string event(std::int64_t agent, const std::string& subject, OpType op, const std::string& object,
                      std::int64_t start, std::optional<std::int64_t> amount = std::nullopt) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "ev%07zu", corpus.events.size());
        Event e;
        e.id = buf;
        e.agent = AgentId{agent};
        e.subject = subject;
        e.op = op;
        e.object = object;
        e.start_time = Timestamp{start};
        e.end_time = Timestamp{start + static_cast<std::int64_t>(below(1000))};
        e.amount = amount;
        corpus.events.push_back(std::move(e));
        return corpus.events.back().id;
    }

    /// Background entities per agent and `count` random events in `range`.
    /// Noise names never contain the planted scenario names.
    void noise(const std::vector<std::int64_t>& agents, const GenerateOptions& o, TimeWindow range, bool network) {
        struct Host {
            std::int64_t agent;
            std::vector<std::string> procs, files, ips;
        };
        std::vector<Host> hosts;
        for (auto a : agents) {
            Host h{a, {}, {}, {}};
            const std::string tag = std::to_string(a);
            for (std::int64_t i = 0; i < o.processes_per_host; ++i)
                h.procs.push_back(process(a, "proc" + tag + "_" + std::to_string(i) + ".exe"));
            for (std::int64_t i = 0; i < o.files_per_host; ++i)
                h.files.push_back(file(a, "/data/h" + tag + "/file" + std::to_string(i) + ".dat"));
            if (network)
                for (std::int64_t i = 0; i < o.ips_per_host; ++i)
                    h.ips.push_back(ip(a, "10." + tag + ".1." + std::to_string(i)));
            hosts.push_back(std::move(h));
        }
        static constexpr OpType file_ops[] = {OpType::read, OpType::write, OpType::execute, OpType::rename,
                                              OpType::remove};
        static constexpr OpType proc_ops[] = {OpType::start, OpType::end};
        static constexpr OpType net_ops[] = {OpType::connect, OpType::read, OpType::write};
        for (std::int64_t n = 0; n < o.noise_events; ++n) {
            const Host& h = hosts[below(hosts.size())];
            const std::string& subject = h.procs[below(h.procs.size())];
            const std::int64_t t = between(range.begin, range.end);
            auto roll = below(100);
            if (network && roll < 25) {
                event(h.agent, subject, net_ops[below(3)], h.ips[below(h.ips.size())], t,
                      static_cast<std::int64_t>(1 + below(1'000'000)));
            } else if (roll < 40) {
                event(h.agent, subject, proc_ops[below(2)], h.procs[below(h.procs.size())], t);
            } else {
                event(h.agent, subject, file_ops[below(5)], h.files[below(h.files.size())], t,
                      static_cast<std::int64_t>(1 + below(100'000)));
            }
        }
    }

    Corpus finish() {
        std::sort(corpus.events.begin(), corpus.events.end(), [](const Event& a, const Event& b) {
            return a.start_time != b.start_time ? a.start_time < b.start_time : a.id < b.id;
        });
        return std::move(corpus);
    }

    Corpus corpus;

private:
    std::mt19937_64 rng_;
};

std::vector<std::int64_t> agent_range(std::int64_t first, std::int64_t count) {
    std::vector<std::int64_t> out;
    for (std::int64_t i = 0; i < count; ++i) out.push_back(first + i);
    return out;
}

std::string day_literal(std::int64_t ms) { return "(at \"" + format_day(utc_day(ms)) + "\")"; }

void apt_chain(Builder& b, const GenerateOptions& o) {
    const TimeWindow day{day_start_ms(utc_day(o.start_ms)), day_start_ms(utc_day(o.start_ms) + 1)};
    b.corpus.manifest.range = day;
    b.noise(agent_range(1, o.hosts), o, day, true);

    const std::int64_t a = 1;
    auto outlook = b.process(a, "outlook.exe");
    auto excel = b.process(a, "excel.exe");
    auto java_file = b.file(a, "C:\\Users\\victim\\AppData\\java.exe");
    auto java = b.process(a, "java.exe");
    auto notepad = b.process(a, "notepad.exe");
    auto c2 = b.ip(a, "203.0.113.129");
    const std::int64_t t0 = day.begin + b.between(kMillisPerHour, 12 * kMillisPerHour);
    // Decoy: the dropper write happens before the phishing attachment opens.
    b.event(a, excel, OpType::write, java_file, t0 - kMillisPerMinute, 4096);
    std::vector<std::string> tuple;
    tuple.push_back(b.event(a, outlook, OpType::start, excel, t0));
    tuple.push_back(b.event(a, excel, OpType::write, java_file, t0 + 20 * kMillisPerSecond, 65536));
    tuple.push_back(b.event(a, excel, OpType::start, java, t0 + 40 * kMillisPerSecond));
    tuple.push_back(b.event(a, java, OpType::start, notepad, t0 + 60 * kMillisPerSecond));
    tuple.push_back(b.event(a, notepad, OpType::write, c2, t0 + 80 * kMillisPerSecond, 1 << 20));
    b.corpus.manifest.tuples.push_back(tuple);
    b.corpus.manifest.queries.push_back(day_literal(day.begin) +
                                        "\n"
                                        "agentid = 1\n"
                                        "proc p1[\"%outlook.exe\"] start proc p2[\"%excel.exe\"] as evt1\n"
                                        "proc p2 write || execute file f1[\"%java.exe\"] as evt2\n"
                                        "proc p2 start proc p3[\"%java.exe\"] as evt3\n"
                                        "proc p3 start proc p4[\"%notepad.exe\"] as evt4\n"
                                        "proc p4 start || read || write ip i1[\"203.0.113.129\"] as evt5\n"
                                        "with evt1 before evt2, evt2 before evt3, evt3 before evt4, evt4 before evt5\n"
                                        "return distinct p1, p2, f1, p3, p4, i1\n");
}

void dependency_chain(Builder& b, const GenerateOptions& o) {
    const TimeWindow day{day_start_ms(utc_day(o.start_ms)), day_start_ms(utc_day(o.start_ms) + 1)};
    b.corpus.manifest.range = day;
    b.noise(agent_range(1, std::max<std::int64_t>(o.hosts, 3)), o, day, true);

    auto p1 = b.process(2, "info_stealer.exe");
    auto f1 = b.file(2, "/tmp/info_stealer.sh");
    auto p2 = b.process(2, "apache2", "www-data");
    auto p3 = b.process(3, "wget");
    auto f2 = b.file(3, "/var/tmp/info_stealer.bin");
    auto f2_old = b.file(3, "/var/tmp/info_stealer.old");
    auto p2_other = b.process(2, "apache2", "www-data");
    auto p3_other = b.process(3, "curl");
    const std::int64_t t0 = day.begin + b.between(kMillisPerHour, 12 * kMillisPerHour);
    const std::int64_t s = kMillisPerSecond;

    // Decoys: each breaks exactly one link of the chain.
    b.event(2, p2, OpType::read, f1, t0 - 60 * s, 512);
    b.event(3, p3, OpType::write, f2_old, t0 + 30 * s, 512);
    b.event(2, p2_other, OpType::connect, p3_other, t0 + 120 * s);
    b.event(3, p3_other, OpType::write, f2, t0 + 150 * s, 512);

    std::vector<std::string> tuple;
    tuple.push_back(b.event(2, p1, OpType::write, f1, t0, 2048));
    tuple.push_back(b.event(2, p2, OpType::read, f1, t0 + 30 * s, 2048));
    tuple.push_back(b.event(2, p2, OpType::connect, p3, t0 + 60 * s));
    tuple.push_back(b.event(3, p3, OpType::write, f2, t0 + 90 * s, 2048));
    b.corpus.manifest.tuples.push_back(tuple);
    b.corpus.manifest.tuples.push_back({tuple[3], tuple[2], tuple[1], tuple[0]});

    const std::string when = day_literal(day.begin) + "\n";
    b.corpus.manifest.queries.push_back(when +
                                        "forward: proc p1[\"%info_stealer%\"] ->[write] file f1[\"%info_stealer%\"]\n"
                                        "<-[read] proc p2[\"%apache%\"]\n"
                                        "->[connect] proc p3[agentid = 3]\n"
                                        "->[write] file f2[\"%info_stealer%\"]\n"
                                        "return f1, p1, p2, p3, f2\n");
    b.corpus.manifest.queries.push_back(when +
                                        "backward: file f2[\"%info_stealer%\"] <-[write] proc p3[agentid = 3]\n"
                                        "<-[connect] proc p2[\"%apache%\"]\n"
                                        "->[read] file f1[\"%info_stealer%\"]\n"
                                        "<-[write] proc p1[\"%info_stealer%\"]\n"
                                        "return f1, p1, p2, p3, f2\n");
}

void netspike(Builder& b, const GenerateOptions& o) {
    const std::int64_t s = kMillisPerSecond;
    const TimeWindow range{o.start_ms, o.start_ms + 380 * s};
    b.corpus.manifest.range = range;
    const auto agents = agent_range(1, o.hosts);
    b.noise(agents, o, range, false);

    // Steady readers: one destination each, read every 5 s.
    for (auto a : agents) {
        for (std::int64_t i = 0; i < std::min<std::int64_t>(o.processes_per_host, 5); ++i) {
            auto reader = b.process(a, "reader" + std::to_string(a) + "_" + std::to_string(i) + ".exe");
            auto dst = b.ip(a, "198.51." + std::to_string(a) + "." + std::to_string(i));
            for (std::int64_t t = i * 100; t < 380 * s; t += 5 * s)
                b.event(a, reader, OpType::read, dst, range.begin + t, 1500);
        }
    }
    // The spiking process: one destination throughout, nine new ones in
    // [350 s, 360 s) so only windows 30..32 see ten.
    auto spike = b.process(1, "spike.exe");
    auto usual = b.ip(1, "192.0.2.1");
    for (std::int64_t t = 0; t < 380 * s; t += 5 * s) b.event(1, spike, OpType::read, usual, range.begin + t, 1500);
    for (std::int64_t i = 0; i < 9; ++i) {
        auto dst = b.ip(1, "192.0.2." + std::to_string(10 + i));
        b.event(1, spike, OpType::read, dst, range.begin + 350 * s + i * s, 1500);
    }
    // Windows 0..29 hold 1 destination and 30..32 hold 10; the SMA3 test
    // x_k > 2 (x_k + x_{k-1} + x_{k-2}) / 3 holds at 30 only (10 > 8, then
    // 10 > 14 and 10 > 20 fail).
    b.corpus.manifest.alert_windows = {30};
    b.corpus.manifest.alert_group = "spike.exe";
    b.corpus.manifest.queries.push_back("(from \"" + format_iso8601(range.begin) + "\" to \"" +
                                        format_iso8601(range.end) +
                                        "\")\n"
                                        "window = 1 min, step = 10 sec\n"
                                        "proc p read ip ipp\n"
                                        "return p, count(distinct ipp) as freq\n"
                                        "group by p\n"
                                        "having freq > 2 * (freq + freq[1] + freq[2]) / 3\n");
}

void uniform(Builder& b, const GenerateOptions& o) {
    const TimeWindow range{o.start_ms, o.start_ms + o.days * kMillisPerDay};
    b.corpus.manifest.range = range;
    b.noise(agent_range(1, o.hosts), o, range, true);
}

}  // namespace

Corpus generate(const GenerateOptions& o) {
    if (o.hosts < 1 || o.processes_per_host < 1 || o.files_per_host < 1 || o.ips_per_host < 1 || o.days < 1 ||
        o.noise_events < 0)
        throw std::invalid_argument("generator scale parameters must be positive");
    Builder b(o.seed);
    b.corpus.manifest.scenario = o.scenario;
    b.corpus.manifest.seed = o.seed;
    switch (o.scenario) {
        case Scenario::apt_chain: apt_chain(b, o); break;
        case Scenario::dependency_chain: dependency_chain(b, o); break;
        case Scenario::netspike: netspike(b, o); break;
        case Scenario::uniform: uniform(b, o); break;
    }
    return b.finish();
}

std::string manifest_to_json(const Manifest& m) {
    nlohmann::ordered_json j;
    j["scenario"] = std::string(to_string(m.scenario));
    j["seed"] = m.seed;
    j["range"] = {{"begin", format_iso8601(m.range.begin)}, {"end", format_iso8601(m.range.end)}};
    j["tuples"] = m.tuples;
    j["queries"] = m.queries;
    if (!m.alert_windows.empty()) {
        j["alert_windows"] = m.alert_windows;
        j["alert_group"] = m.alert_group;
    }
    return j.dump(2) + "\n";
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw StoreError("cannot create " + dir.string() + ": " + ec.message());
    auto open = [&](const char* name) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw StoreError("cannot write " + (dir / name).string());
        return out;
    };
    {
        auto out = open("entities.jsonl");
        for (const auto& e : corpus.entities) out << entity_to_json_line(e) << '\n';
    }
    {
        auto out = open("events.jsonl");
        for (const auto& e : corpus.events) out << event_to_json_line(e) << '\n';
    }
    open("manifest.json") << manifest_to_json(corpus.manifest);
}

}  // namespace aiql
