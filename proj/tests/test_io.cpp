#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "rnet/io.hpp"
#include "rnet/random.hpp"

using namespace rnet;
using nlohmann::json;

TEST_CASE("network JSON round trip") {
    Rng rng(1);
    const auto net = random_network(LatticeSpec(3), 1, 2, rng);
    const std::string text = network_to_json(net);
    const auto back = network_from_json(text);
    CHECK(back.spec() == net.spec());
    for (std::size_t i = 0; i < net.values().size(); ++i) CHECK(back.values()[i] == net.values()[i]);
    const auto doc = json::parse(text);
    CHECK(doc["schema"] == "rnet-network/1");
    CHECK(doc["length"] == 3);
    CHECK(doc["conductances"].size() == 24);
}

TEST_CASE("network JSON rejects malformed documents") {
    const std::string good = network_to_json(ConductanceMap::uniform(LatticeSpec(1), 1.0));
    auto doc = json::parse(good);

    auto missing = doc;
    missing["conductances"].erase("S:2");
    CHECK_THROWS_AS(network_from_json(missing.dump()), InvalidInput);

    auto extra = doc;
    extra["conductances"]["H:1:1"] = 1.0;
    CHECK_THROWS_AS(network_from_json(extra.dump()), InvalidInput);

    auto negative = doc;
    negative["conductances"]["S:3"] = -1.0;
    CHECK_THROWS_AS(network_from_json(negative.dump()), InvalidInput);

    auto zero = doc;
    zero["conductances"]["S:3"] = 0.0;
    CHECK_THROWS_AS(network_from_json(zero.dump()), InvalidInput);

    auto schema = doc;
    schema["schema"] = "other/1";
    CHECK_THROWS_AS(network_from_json(schema.dump()), InvalidInput);

    const std::string duplicate =
        R"({"schema":"rnet-network/1","length":1,"conductances":{"S:1":1,"S:1":2,"S:2":1,"S:3":1,"S:4":1}})";
    CHECK_THROWS_AS(network_from_json(duplicate), InvalidInput);
    CHECK_THROWS_AS(network_from_json("{not json"), InvalidInput);
    CHECK_THROWS_AS(network_from_json(R"({"schema":"rnet-network/1","length":1,"conductances":{"S:1":"a"}})"),
                    InvalidInput);
}

TEST_CASE("reconstruction JSON and CSV") {
    Rng rng(2);
    const auto net = random_network(LatticeSpec(4), 1, 2, rng);
    const auto r = reconstruct_full(response_matrix(net));
    const std::string text = reconstruction_to_json(r);
    const auto doc = json::parse(text);
    CHECK(doc["schema"] == "rnet-recon/1");
    CHECK(doc["edges"].size() == 40);
    CHECK(doc["edges"][0]["id"] == "S:1");
    CHECK(doc["diagnostics"]["layers"].size() == 2);
    CHECK(doc["diagnostics"].contains("elapsedMs"));
    const auto back = reconstruction_from_json(text);
    CHECK(back.conductances == r.conductances);

    const std::string csv = reconstruction_to_csv(r);
    CHECK(csv.rfind("id,conductance,resistance\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);

    ReconstructionResult bad = r;
    bad.conductances[0] = 0.0;
    CHECK(json::parse(reconstruction_to_json(bad))["edges"][0]["resistance"].is_null());
}

TEST_CASE("delta JSON round trip") {
    const LatticeSpec spec(2);
    std::vector<double> r0(12, 1.0), r(12, 1.0);
    r[5] = 1.5;
    const auto map = compute_delta_map(spec, r0, r);
    const auto back = delta_from_json(delta_to_json(map));
    CHECK(back.delta == map.delta);
    CHECK(delta_to_csv(map).find("S:6,0.5") != std::string::npos);
}

TEST_CASE("file helpers") {
    const auto dir = std::filesystem::temp_directory_path() / "rnet_io_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "out.txt").string();
    write_file_atomic(path, "hello\n");
    CHECK(read_text_file(path) == "hello\n");
    write_file_atomic(path, "again\n");
    CHECK(read_text_file(path) == "again\n");
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(read_text_file((dir / "missing").string()), IoError);
    CHECK_THROWS_AS(write_file_atomic((dir / "no" / "such" / "x").string(), "x"), IoError);
}
