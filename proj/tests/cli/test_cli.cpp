#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "plot.hpp"
#include "presets.hpp"
#include "promptbo/error.hpp"
#include "promptbo/protocol.hpp"
#include "promptbo/trace.hpp"
#include "stub_server.hpp"
#include "temp_dir.hpp"

using namespace promptbo;
using namespace promptbo::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json lookup_config(std::size_t n_init = 4, std::size_t budget = 6) {
    return {{"vocab_size", 6},
            {"prompt_length", 3},
            {"objective", {{"builtin", {{"kind", "lookup"}, {"seed", 9}}}}},
            {"n_init", n_init},
            {"budget", budget},
            {"top_b", 3},
            {"seed", 4},
            {"clock", "tick"},
            {"acquisition", {{"n_raw_probes", 64}, {"n_restarts", 4}}},
            {"out_dir", "run"}};
}

fs::path write_config(const testing::TempDir& dir, const json& config, const std::string& name = "config.json") {
    return dir.write(name, config.dump(2));
}

std::string vocab_text(std::size_t n) {
    std::string text;
    for (std::size_t i = 0; i < n; ++i) text += "w" + std::to_string(i) + "\n";
    return text;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome optimize(const OptimizeOptions& options) {
    std::ostringstream out, err;
    const int code = cmd_optimize(options, out, err);
    return {code, out.str(), err.str()};
}

Outcome optimize(const fs::path& config) { return optimize(OptimizeOptions{config, {}, {}, {}}); }

json read_json(const fs::path& p) { return json::parse(read_text_file(p)); }

}  // namespace

TEST_CASE("task presets") {
    const auto& presets = task_presets();
    REQUIRE(presets.size() == 6);
    struct Expected {
        const char* name;
        std::size_t vocab, length;
        const char* metric;
    };
    const Expected expected[] = {{"MNLI", 117056, 10, "acc"}, {"QQP", 61571, 25, "F1"},  {"SST-2", 3747, 50, "acc"},
                                 {"MRPC", 7940, 50, "F1"},    {"QNLI", 3163, 50, "acc"}, {"RTE", 46992, 50, "acc"}};
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(presets[i].name == expected[i].name);
        CHECK(presets[i].vocab_size == expected[i].vocab);
        CHECK(presets[i].prompt_length == expected[i].length);
        CHECK(presets[i].metric == expected[i].metric);
    }
    CHECK(find_preset("sst2")->name == "SST-2");
    CHECK(find_preset("SST_2")->name == "SST-2");
    CHECK(find_preset("mrpc")->vocab_size == 7940);
    CHECK(find_preset("cola") == nullptr);
}

TEST_CASE("config defaults and preset resolution") {
    const json doc = {{"task_preset", "qqp"}, {"objective", {{"builtin", {{"kind", "lookup"}}}}}};
    const CliConfig c = parse_config(doc, "/base");
    CHECK(c.vocab_size == 61571);
    CHECK(c.prompt_length == 25);
    CHECK(c.run.n_init == 10);
    CHECK(c.run.budget == 90);
    CHECK(c.run.top_b == 5);
    CHECK(c.run.acquisition.beta == 2.0);
    CHECK(c.out_dir == fs::path("/base/out"));
    CHECK(c.clock == ClockKind::Wall);

    json sweep = doc;
    sweep["prompt_length"] = 10;
    CHECK(parse_config(sweep, "/base").prompt_length == 10);
}

TEST_CASE("config errors list every bad key") {
    const json doc = {{"task_preset", "nope"},
                      {"n_init", 0},
                      {"budget", -3},
                      {"beta", "high"},
                      {"clock", "sundial"},
                      {"colour", 1},
                      {"objective", {{"remote", {{"url", 5}, {"retries", -1}, {"extra", true}}}}}};
    try {
        parse_config(doc, "/");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        for (const char* key : {"task_preset:", "n_init:", "budget:", "beta:", "clock:", "colour:",
                                "objective.remote.url:", "objective.remote.retries:", "objective.remote.extra:",
                                "vocab_path:", "prompt_length:"}) {
            CHECK_MESSAGE(msg.find(std::string("\n  ") + key) != std::string::npos, key);
        }
    }
}

TEST_CASE("config rejects inconsistent combinations") {
    json doc = {{"task_preset", "rte"}, {"vocab_size", 10}, {"objective", {{"builtin", {{"kind", "lookup"}}}}}};
    CHECK_THROWS_WITH_AS(parse_config(doc, "/"), doctest::Contains("vocab_size: conflicts"), ConfigError);
    doc = lookup_config(2, 0);
    CHECK_THROWS_WITH_AS(parse_config(doc, "/"), doctest::Contains("top_b:"), ConfigError);
    doc = lookup_config();
    doc["objective"] = {{"remote", {{"url", "http://x"}}}, {"builtin", {{"kind", "lookup"}}}};
    CHECK_THROWS_WITH_AS(parse_config(doc, "/"), doctest::Contains("objective:"), ConfigError);
    doc = lookup_config();
    doc["objective"] = {{"remote", {{"url", "http://x"}}}};
    CHECK_THROWS_WITH_AS(parse_config(doc, "/"), doctest::Contains("vocab_path:"), ConfigError);
    CHECK_THROWS_AS(parse_config(json::array(), "/"), ConfigError);
}

TEST_CASE("config echo parses back to the same configuration") {
    json doc = lookup_config();
    doc["vocab_path"] = "v.txt";
    doc["vocab_size"] = 6;
    doc["skip_duplicates"] = true;
    doc["beta"] = 0.5;
    const CliConfig c = parse_config(doc, "/cfg");
    CHECK(c.vocab_path == fs::path("/cfg/v.txt"));
    const json echoed = echo_config(c);
    CHECK(echo_config(parse_config(echoed, "/elsewhere")) == echoed);
}

TEST_CASE("optimize with the builtin objective") {
    testing::TempDir dir;
    const auto r = optimize(write_config(dir, lookup_config()));
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    const auto rows = read_trace(dir / "run/trace.csv");
    CHECK(rows.size() == 10);
    const json result = read_json(dir / "run/result.json");
    CHECK(result["status"] == "ok");
    CHECK(result["seed"] == 4);
    CHECK(result["n_observations"] == 10);
    REQUIRE(result["top_prompts"].size() == 3);
    CHECK(result["top_prompts"][0]["score"] == result["best_seen"]);
    CHECK(result["top_prompts"][0]["text"].is_null());
    CHECK(result["config"]["objective"]["builtin"]["seed"] == 9);
    double best = 0.0;
    for (const auto& row : rows) best = std::max(best, row.score);
    CHECK(result["best_seen"] == best);
}

TEST_CASE("optimize renders top prompts through the vocabulary") {
    testing::TempDir dir;
    dir.write("vocab.txt", "red\ngreen\nblue\ncyan\nmagenta\nyellow\n");
    json doc = lookup_config();
    doc.erase("vocab_size");
    doc["vocab_path"] = "vocab.txt";
    REQUIRE(optimize(write_config(dir, doc)).code == kExitOk);
    const json result = read_json(dir / "run/result.json");
    const auto& top = result["top_prompts"][0];
    const std::vector<std::string> words{"red", "green", "blue", "cyan", "magenta", "yellow"};
    std::string expected;
    for (const auto& id : top["prompt_ids"]) expected += (expected.empty() ? "" : " ") + words[id.get<std::size_t>()];
    CHECK(top["text"] == expected);
    CHECK(result["config"]["vocab_size"] == 6);
}

TEST_CASE("fixed seed gives a byte-identical trace, also from the echoed config") {
    testing::TempDir dir;
    const auto config = write_config(dir, lookup_config());
    REQUIRE(optimize(config).code == kExitOk);
    const std::string first = read_text_file(dir / "run/trace.csv");
    REQUIRE(optimize(config).code == kExitOk);
    CHECK(read_text_file(dir / "run/trace.csv") == first);

    json echoed = read_json(dir / "run/result.json")["config"];
    echoed["out_dir"] = (dir / "rerun").string();
    REQUIRE(optimize(write_config(dir, echoed, "echo.json")).code == kExitOk);
    CHECK(read_text_file(dir / "rerun/trace.csv") == first);
}

TEST_CASE("command-line overrides") {
    testing::TempDir dir;
    const auto config = write_config(dir, lookup_config());
    REQUIRE(optimize(OptimizeOptions{config, 99, 0.25, {}}).code == kExitOk);
    const json result = read_json(dir / "run/result.json");
    CHECK(result["seed"] == 99);
    CHECK(result["config"]["seed"] == 99);
    CHECK(result["config"]["beta"] == 0.25);
    CHECK(optimize(OptimizeOptions{config, {}, -1.0, {}}).code == kExitConfig);
}

TEST_CASE("missing vocabulary file fails before any trace is written") {
    testing::TempDir dir;
    json doc = lookup_config();
    doc.erase("vocab_size");
    doc["vocab_path"] = "absent.txt";
    const auto r = optimize(write_config(dir, doc));
    CHECK(r.code == kExitConfig);
    CHECK(r.err.find("absent.txt") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "run/trace.csv"));
}

TEST_CASE("configuration failures exit with status 1") {
    testing::TempDir dir;
    CHECK(optimize(dir / "nothing.json").code == kExitConfig);
    dir.write("broken.json", "{\"n_init\": ");
    CHECK(optimize(dir / "broken.json").code == kExitConfig);
    json big = lookup_config();
    big["vocab_size"] = 10000;
    const auto r = optimize(write_config(dir, big));
    CHECK(r.code == kExitConfig);
    CHECK_FALSE(fs::exists(dir / "run/trace.csv"));
}

TEST_CASE("mrpc preset sends prompts of length 50 to the scorer") {
    testing::TempDir dir;
    dir.write("mrpc_vocab.txt", vocab_text(7940));
    testing::StubServer server([](const httplib::Request& req, httplib::Response& res) {
        const auto request = parse_score_request(req.body);
        double s = 0.0;
        for (auto id : request.prompt_ids) s += static_cast<double>(id % 7) / 7.0;
        testing::reply_json(res, serialize(ScoreResponse{s / 50.0, 408, std::nullopt, std::nullopt}));
    });
    const json doc = {{"task_preset", "MRPC"},
                      {"vocab_path", "mrpc_vocab.txt"},
                      {"objective", {{"remote", {{"url", server.url()}, {"retries", 0}, {"timeout_s", 5}}}}},
                      {"n_init", 3},
                      {"budget", 2},
                      {"top_b", 2},
                      {"acquisition", {{"n_raw_probes", 32}, {"n_restarts", 2}}},
                      {"out_dir", "run"}};
    const auto r = optimize(write_config(dir, doc));
    REQUIRE_MESSAGE(r.code == kExitOk, r.err);
    const auto bodies = server.bodies();
    REQUIRE(bodies.size() == 5);
    for (const auto& body : bodies) {
        const auto request = parse_score_request(body);
        CHECK(request.prompt_ids.size() == 50);
        CHECK(std::count(request.prompt_text.begin(), request.prompt_text.end(), ' ') == 49);
        CHECK(request.split == "dev");
    }
    CHECK(read_trace(dir / "run/trace.csv").size() == 5);
    const json result = read_json(dir / "run/result.json");
    CHECK(result["top_prompts"][0]["text"].get<std::string>().rfind("w", 0) == 0);
    CHECK(fs::exists(dir / "run/scorer.log"));
}

TEST_CASE("scorer URL override") {
    testing::TempDir dir;
    dir.write("v.txt", vocab_text(6));
    testing::StubServer server([](const httplib::Request&, httplib::Response& res) {
        testing::reply_json(res, R"({"score":0.5,"n_examples":10})");
    });
    json doc = lookup_config(2, 1);
    doc.erase("vocab_size");
    doc["vocab_path"] = "v.txt";
    doc["top_b"] = 1;
    doc["objective"] = {{"remote", {{"url", "http://127.0.0.1:1"}, {"retries", 0}}}};
    const auto config = write_config(dir, doc);
    REQUIRE(optimize(OptimizeOptions{config, {}, {}, server.url()}).code == kExitOk);
    CHECK(server.hits() == 3);
    CHECK(read_json(dir / "run/result.json")["config"]["objective"]["remote"]["url"] == server.url());

    ::setenv(kScorerUrlEnv, server.url().c_str(), 1);
    CHECK(scorer_url_from_env() == server.url());
    ::setenv(kScorerUrlEnv, "", 1);
    CHECK_FALSE(scorer_url_from_env().has_value());
    ::unsetenv(kScorerUrlEnv);
    CHECK_FALSE(scorer_url_from_env().has_value());
}

TEST_CASE("scorer failure mid-run exits 2 and keeps the partial trace") {
    testing::TempDir dir;
    dir.write("v.txt", vocab_text(6));
    std::atomic<int> calls{0};
    testing::StubServer server([&](const httplib::Request&, httplib::Response& res) {
        if (++calls > 3) {
            testing::reply_json(res, R"({"error":"model crashed"})", 500);
        } else {
            testing::reply_json(res, R"({"score":0.25,"n_examples":10})");
        }
    });
    json doc = lookup_config(2, 4);
    doc.erase("vocab_size");
    doc["vocab_path"] = "v.txt";
    doc["top_b"] = 1;
    doc["objective"] = {{"remote", {{"url", server.url()}, {"retries", 0}}}};
    const auto r = optimize(write_config(dir, doc));
    CHECK(r.code == kExitObjective);
    CHECK(read_trace(dir / "run/trace.csv").size() == 3);
    const json result = read_json(dir / "run/result.json");
    CHECK(result["status"] == "aborted");
    CHECK(result["n_observations"] == 3);
    CHECK(result["error"].get<std::string>().find("500") != std::string::npos);
}

TEST_CASE("compare runs every method on matched seeds") {
    testing::TempDir dir;
    const auto config = write_config(dir, lookup_config());
    std::ostringstream out, err;
    REQUIRE(cmd_compare(CompareOptions{config, {"bo", "random"}, {1, 2, 3}, {}}, out, err) == kExitOk);
    CHECK(out.str().find("bo") != std::string::npos);

    const std::string summary = read_text_file(dir / "run/summary.csv");
    std::istringstream lines(summary);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "method,runs,mean_best_seen,std_best_seen,total_seconds");
    std::vector<std::string> rows;
    while (std::getline(lines, line)) rows.push_back(line);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].rfind("bo,3,", 0) == 0);
    CHECK(rows[1].rfind("random,3,", 0) == 0);

    std::istringstream csv(read_text_file(dir / "run/compare.csv"));
    std::getline(csv, line);
    CHECK(line == "method,seed,iteration,elapsed_seconds,best_seen");
    std::map<std::string, double> last_elapsed;
    std::map<std::string, int> counts;
    while (std::getline(csv, line)) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
        REQUIRE(f.size() == 5);
        const std::string run = f[0] + "/" + f[1];
        const double elapsed = std::stod(f[3]);
        if (counts[run]++ > 0) CHECK(elapsed > last_elapsed[run]);
        last_elapsed[run] = elapsed;
    }
    CHECK(counts.size() == 6);
    for (const auto& [run, n] : counts) CHECK(n == 10);
}

TEST_CASE("compare validates its method list") {
    testing::TempDir dir;
    const auto config = write_config(dir, lookup_config());
    std::ostringstream out, err;
    CHECK(cmd_compare(CompareOptions{config, {"bo"}, {1}, {}}, out, err) == kExitConfig);
    CHECK(cmd_compare(CompareOptions{config, {"bo", "cmaes"}, {1}, {}}, out, err) == kExitConfig);
    CHECK(cmd_compare(CompareOptions{config, {"bo", "bo"}, {1}, {}}, out, err) == kExitConfig);
}

TEST_CASE("plot series from traces") {
    testing::TempDir dir;
    const std::string header = std::string(kTraceHeader) + "\n";
    const auto a = dir.write("a.csv", header + "0,0.5,1 2,0.3,0.3\n1,1.0,2 2,0.1,0.3\n2,1.5,0 1,0.6,0.6\n");
    const auto b = dir.write("b,x.csv", header + "0,0.25,0 0,0.4,0.4\n");

    const auto single = read_series(a);
    REQUIRE(single.size() == 1);
    CHECK(single[0].label == a.string());
    CHECK(single[0].points.size() == 3);
    CHECK(single[0].points[2].best_seen == 0.6);

    std::ostringstream out, err;
    REQUIRE(cmd_plot(PlotOptions{{a, b}, true, dir / "tidy.csv"}, out, err) == kExitOk);
    const auto tidy = read_series(dir / "tidy.csv");
    REQUIRE(tidy.size() == 2);
    CHECK(tidy[0] == single[0]);
    CHECK(tidy[1].label == b.string());

    // Re-ingesting the tidy file reproduces it exactly.
    REQUIRE(cmd_plot(PlotOptions{{dir / "tidy.csv"}, true, dir / "again.csv"}, out, err) == kExitOk);
    CHECK(read_text_file(dir / "again.csv") == read_text_file(dir / "tidy.csv"));

    REQUIRE(cmd_plot(PlotOptions{{a, b}, false, dir / "plot.svg"}, out, err) == kExitOk);
    const std::string svg = read_text_file(dir / "plot.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
    std::size_t polylines = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++polylines;
    CHECK(polylines == 2);
}

TEST_CASE("plot reports the malformed line") {
    testing::TempDir dir;
    const auto bad = dir.write("bad.csv", std::string(kTraceHeader) + "\n0,0.5,1 2,0.3,0.3\n1,oops,2 2,0.1,0.3\n");
    std::ostringstream out, err;
    CHECK(cmd_plot(PlotOptions{{bad}, false, dir / "p.svg"}, out, err) == kExitConfig);
    CHECK(err.str().find("line 3") != std::string::npos);
    CHECK(cmd_plot(PlotOptions{{dir / "missing.csv"}, false, dir / "p.svg"}, out, err) == kExitConfig);
    const auto bad_tidy = dir.write("bad_tidy.csv", std::string(kSeriesHeader) + "\nx,1,2\nx,1\n");
    CHECK_THROWS_WITH_AS(read_series(bad_tidy), doctest::Contains("line 3"), Error);
}
