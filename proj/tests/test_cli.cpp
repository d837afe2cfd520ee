// End-to-end tests of the qcollect binary: spawns the real executable and
// checks outputs, determinism and exit codes.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

#include "qcollect/io.hpp"
#include "qcollect/qcore.hpp"
#include "test_util.hpp"

using namespace qcollect;
using nlohmann::json;

namespace {

int run_cli(const std::string& args, const std::string& stdout_path = "cli_out.txt") {
    const std::string cmd = std::string(QCOLLECT_CLI_PATH) + " " + args + " > " + stdout_path +
                            " 2> cli_err.txt";
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_bell_file(const std::string& path) {
    const TensorShape shape(2, 2);
    const double r = 1.0 / std::sqrt(2.0);
    io::write_text_file(path, io::pure_to_json(PureState(shape, {r, 0.0, 0.0, r})));
}

void write_mixed_file(const std::string& path, const DensityMatrix& rho) {
    io::write_text_file(path, io::density_to_json(rho));
}

json parse_json_file(const std::string& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("crit-table emits both panels with the expected cells") {
    REQUIRE(run_cli("crit-table") == 0);
    const std::string out = slurp("cli_out.txt");
    CHECK(out.find("bipartite,N,2,0.2500,0.3333,0.3456") != std::string::npos);
    CHECK(out.find("bipartite,N,3,0.1111,0.1250,0.1728") != std::string::npos);
    CHECK(out.find("bipartite,N,4,0.0625,0.0667,0.1033") != std::string::npos);
    CHECK(out.find("qubits,K,2,0.2500,0.3333,0.3456") != std::string::npos);
    CHECK(out.find("qubits,K,3,0.1250,0.1429,0.1599") != std::string::npos);
    CHECK(out.find("qubits,K,4,0.0625,0.0667,0.0808") != std::string::npos);
    CHECK(out.find("# qcollect") == 0);
}

TEST_CASE("werner-scan rows are ordered and monotone") {
    REQUIRE(run_cli("werner-scan --lambda-steps 11") == 0);
    std::istringstream in(slurp("cli_out.txt"));
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("lambda", 0) == 0) continue;
        double lambda, at, ac;
        char comma;
        std::istringstream ls(line);
        ls >> lambda >> comma >> at >> comma >> ac;
        CHECK(at <= ac + 1e-9);
        if (std::abs(lambda - 0.5) < 1e-9) {
            CHECK(at == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
            CHECK(ac == doctest::Approx(0.366025).epsilon(1e-4));
        }
        ++rows;
    }
    CHECK(rows == 11);
    CHECK(run_cli("werner-scan --lambda-steps 1") != 0);
}

TEST_CASE("collect on the Bell state detects entanglement end to end") {
    write_bell_file("cli_bell.json");
    REQUIRE(run_cli("collect --input cli_bell.json --pure --restarts 8 --seed 5 "
                    "--output cli_collect.json") == 0);
    const json rep = parse_json_file("cli_collect.json");
    CHECK(rep["value"].get<double>() == doctest::Approx(0.25).epsilon(1e-5));
    CHECK(rep["verdict"] == "ENTANGLED_DETECTED");
    CHECK(rep["seed"] == 5);
    CHECK(rep["version"] == "1.0.0");
    CHECK(rep["bounds"]["detection_threshold"].get<double>() ==
          doctest::Approx(0.0625).epsilon(1e-9));
}

TEST_CASE("collect on the maximally mixed state returns zero") {
    ComplexMatrix m(4, 4);
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = 0.25;
    write_mixed_file("cli_mixed.json", validate_density(m, TensorShape(2, 2)));
    REQUIRE(run_cli("collect --input cli_mixed.json --mixed --restarts 4 "
                    "--output cli_collect2.json") == 0);
    const json rep = parse_json_file("cli_collect2.json");
    CHECK(rep["value"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep["verdict"] == "INCONCLUSIVE");
    CHECK(rep["bounds"]["universal_name"] == "r_N(N^K, 1, purity)");
}

TEST_CASE("malformed and invalid inputs exit with code 2") {
    io::write_text_file("cli_bad.json", "{ not json");
    CHECK(run_cli("collect --input cli_bad.json --pure") == 2);

    // matrix with a structurally negative eigenvalue
    io::write_text_file("cli_neg.json",
                        "{\"k\":2,\"n\":2,\"matrix\":["
                        "[[1,0],[0,0],[0,0],[0,0]],"
                        "[[0,0],[-0.1,0],[0,0],[0,0]],"
                        "[[0,0],[0,0],[0.05,0],[0,0]],"
                        "[[0,0],[0,0],[0,0],[0.05,0]]]}");
    CHECK(run_cli("collect --input cli_neg.json --mixed") == 2);
    CHECK(slurp("cli_err.txt").find("NegativeEigenvalue") != std::string::npos);

    CHECK(run_cli("witness --input cli_missing_file.json") == 2);
}

TEST_CASE("witness command reports the Bell violation and the mixed ceiling") {
    write_bell_file("cli_bell.json");
    REQUIRE(run_cli("witness --input cli_bell.json --output cli_witness.json") == 0);
    const json rep = parse_json_file("cli_witness.json");
    CHECK(rep["primal"]["W"].get<double>() == doctest::Approx(-0.25).epsilon(1e-9));
    CHECK(rep["verdict"] == "ENTANGLED_DETECTED");
    CHECK(rep["ya_criteria"]["value"].get<double>() == doctest::Approx(0.25).epsilon(1e-9));

    ComplexMatrix m(4, 4);
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = 0.25;
    write_mixed_file("cli_mixed.json", validate_density(m, TensorShape(2, 2)));
    REQUIRE(run_cli("witness --input cli_mixed.json --output cli_witness2.json") == 0);
    const json mixed = parse_json_file("cli_witness2.json");
    CHECK(mixed["verdict"] == "INCONCLUSIVE");
    CHECK(mixed["budget"]["eta"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("witness detects the lightly depolarized Bell state") {
    write_mixed_file("cli_dep.json", testutil::depolarized_bell(0.05));
    REQUIRE(run_cli("witness --input cli_dep.json --output cli_witness3.json") == 0);
    CHECK(parse_json_file("cli_witness3.json")["verdict"] == "ENTANGLED_DETECTED");

    write_mixed_file("cli_dep2.json", testutil::depolarized_bell(0.20));
    REQUIRE(run_cli("witness --input cli_dep2.json --output cli_witness4.json") == 0);
    CHECK(parse_json_file("cli_witness4.json")["verdict"] == "INCONCLUSIVE");
}

TEST_CASE("simulate is deterministic and feeds the click-based witness") {
    write_bell_file("cli_bell.json");
    REQUIRE(run_cli("simulate --input cli_bell.json --shots 200000 --seed 7 "
                    "--output-prefix cli_sim") == 0);
    const std::string a1 = slurp("cli_sim_axis1.csv");
    const std::string a2 = slurp("cli_sim_axis2.csv");
    const json rep = parse_json_file("cli_sim_report.json");
    CHECK(rep["verdict"] == "ENTANGLED_DETECTED");
    CHECK(rep["primal"].contains("W_se"));

    REQUIRE(run_cli("simulate --input cli_bell.json --shots 200000 --seed 7 "
                    "--output-prefix cli_sim_b") == 0);
    CHECK(slurp("cli_sim_b_axis1.csv") == a1);
    CHECK(slurp("cli_sim_b_axis2.csv") == a2);

    REQUIRE(run_cli("simulate --input cli_bell.json --shots 200000 --seed 8 "
                    "--output-prefix cli_sim_c") == 0);
    CHECK(slurp("cli_sim_c_axis1.csv") != a1);

    // feeding the records back through the witness command
    REQUIRE(run_cli("witness --clicks cli_sim_axis1.csv cli_sim_axis2.csv "
                    "--output cli_witness5.json") == 0);
    const json wrep = parse_json_file("cli_witness5.json");
    CHECK(wrep["verdict"] == "ENTANGLED_DETECTED");
    CHECK(wrep["from_counts"] == true);
}

TEST_CASE("simulate with a tiny sample warns and stays inconclusive") {
    write_bell_file("cli_bell.json");
    REQUIRE(run_cli("simulate --input cli_bell.json --shots 10 --seed 3 "
                    "--output-prefix cli_tiny") == 0);
    const json rep = parse_json_file("cli_tiny_report.json");
    CHECK(rep.contains("warning"));
    CHECK(rep["verdict"] == "INCONCLUSIVE");
}
