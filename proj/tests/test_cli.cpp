#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "aprabe/cli.hpp"

using namespace aprabe;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    fs::path dir;
    std::string out, err;

    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("aprabe_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string at(const std::string& name) const { return (dir / name).string(); }

    int run(std::vector<std::string> args) {
        std::ostringstream o, e;
        const int code = cli::run_cli(args, o, e);
        out = o.str();
        err = e.str();
        return code;
    }

    void provision(const std::string& backend = "debug") {
        ASSERT_EQ(run({"--seed", "1", "setup", "--matrix", std::string(APRABE_EXAMPLE_DIR) + "/ehr_matrix.json", "--pk",
                       at("pk"), "--msk", at("msk"), "--backend", backend}),
                  0)
            << err;
        ASSERT_EQ(run({"--seed", "2", "keygen", "--pk", at("pk"), "--msk", at("msk"), "--policy",
                       "[HospA] AND [Prof] AND [Yrs5]", "--out", at("sk")}),
                  0)
            << err;
        std::ofstream(at("plain")) << "patient record";
    }
};

}  // namespace

TEST_F(Cli, FullWorkflow) {
    provision();
    ASSERT_EQ(run({"delegate", "--pk", at("pk"), "--key", at("sk"), "--extend", "1=Cardio", "--extend", "2=∅",
                   "--extend", "3=∅", "--out", at("sk2")}),
              0)
        << err;
    ASSERT_EQ(run({"encrypt", "--pk", at("pk"), "--attrs", "[HospA,Cardio];[Prof,∅];[Yrs5,∅]", "--in", at("plain"),
                   "--out", at("ct")}),
              0)
        << err;
    ASSERT_EQ(run({"decrypt", "--pk", at("pk"), "--key", at("sk2"), "--in", at("ct"), "--out", at("back")}), 0) << err;
    EXPECT_EQ(read_text_file(at("back")), "patient record");
}

TEST_F(Cli, UnauthorizedDecryptWritesNothing) {
    provision();
    ASSERT_EQ(run({"encrypt", "--pk", at("pk"), "--attrs", "[HospA];[Prof]", "--in", at("plain"), "--out", at("ct")}), 0);
    EXPECT_EQ(run({"decrypt", "--pk", at("pk"), "--key", at("sk"), "--in", at("ct"), "--out", at("back")}), 3);
    EXPECT_FALSE(fs::exists(at("back")));
}

TEST_F(Cli, ExitCodes) {
    provision();
    EXPECT_EQ(run({}), 1);
    EXPECT_EQ(run({"keygen", "--pk", at("pk")}), 1);
    EXPECT_EQ(run({"setup", "--matrix", "x", "--pk", "p", "--msk", "m", "--backend", "quantum"}), 1);
    EXPECT_EQ(run({"keygen", "--pk", at("pk"), "--msk", at("msk"), "--policy", "[HospA] AND", "--out", at("x")}), 2);
    EXPECT_NE(err.find("position"), std::string::npos);
    EXPECT_EQ(run({"keygen", "--pk", at("pk"), "--msk", at("msk"), "--policy", "[Nurse]", "--out", at("x")}), 2);
    EXPECT_EQ(run({"delegate", "--pk", at("pk"), "--key", at("sk"), "--extend", "1=Cardio", "--out", at("x")}), 2);
    EXPECT_EQ(run({"delegate", "--pk", at("pk"), "--key", at("sk"), "--extend", "zero=Cardio", "--out", at("x")}), 2);
    EXPECT_EQ(run({"decrypt", "--pk", at("nope"), "--key", at("sk"), "--in", at("ct"), "--out", at("x")}), 4);
    EXPECT_EQ(run({"keygen", "--pk", at("sk"), "--msk", at("msk"), "--policy", "[HospA]", "--out", at("x")}), 2);
    EXPECT_FALSE(fs::exists(at("x")));

    Bytes pk = read_file(at("pk"));
    pk[pk.size() / 2] ^= 1;
    write_file_atomic(at("pk_bad"), pk);
    EXPECT_EQ(run({"keygen", "--pk", at("pk_bad"), "--msk", at("msk"), "--policy", "[HospA]", "--out", at("x")}), 5);
}

TEST_F(Cli, TamperedPayloadFailsAuthentication) {
    provision();
    ASSERT_EQ(run({"encrypt", "--pk", at("pk"), "--attrs", "[HospA];[Prof];[Yrs5]", "--in", at("plain"), "--out",
                   at("ct")}),
              0);
    // Re-frame the ciphertext with a flipped payload byte so the file checksum is valid.
    auto ct = load_ciphertext<DebugGroup>(read_file(at("ct")));
    ct.value.payload.back() ^= 1;
    const DebugGroup grp(ct.binding.params);
    write_file_atomic(at("ct"), save_ciphertext(ct.value.ct, grp, ct.binding, ct.value.payload));
    EXPECT_EQ(run({"decrypt", "--pk", at("pk"), "--key", at("sk"), "--in", at("ct"), "--out", at("back")}), 5);
    EXPECT_FALSE(fs::exists(at("back")));
}

TEST_F(Cli, MismatchedMatrixIsRejected) {
    provision();
    std::ofstream(at("other.json")) << R"({"levels":[["HospA","Prof","Yrs5"]]})";
    ASSERT_EQ(run({"--seed", "1", "setup", "--matrix", at("other.json"), "--pk", at("pk2"), "--msk", at("msk2")}), 0);
    EXPECT_EQ(run({"keygen", "--pk", at("pk2"), "--msk", at("msk"), "--policy", "[HospA]", "--out", at("x")}), 2);
    EXPECT_NE(err.find("matrix"), std::string::npos);
}

TEST_F(Cli, SeededSetupIsReproducible) {
    const std::string matrix = std::string(APRABE_EXAMPLE_DIR) + "/ehr_matrix.json";
    ASSERT_EQ(run({"--seed", "9", "setup", "--matrix", matrix, "--pk", at("a"), "--msk", at("am")}), 0);
    ASSERT_EQ(run({"--seed", "9", "setup", "--matrix", matrix, "--pk", at("b"), "--msk", at("bm")}), 0);
    EXPECT_EQ(read_file(at("a")), read_file(at("b")));
}

TEST_F(Cli, InspectDescribesPublicArtifacts) {
    provision();
    ASSERT_EQ(run({"inspect", at("pk")}), 0);
    EXPECT_NE(out.find("kind: public key"), std::string::npos);
    EXPECT_NE(out.find("levels L: 2"), std::string::npos);
    ASSERT_EQ(run({"inspect", at("sk")}), 0);
    EXPECT_NE(out.find("[Yrs5]"), std::string::npos);
    EXPECT_EQ(run({"inspect", at("missing")}), 4);
}

TEST_F(Cli, DemoOnBothBackends) {
    for (const std::string backend : {"debug", "curve"}) {
        ASSERT_EQ(run({"--seed", "4", "demo", "--backend", backend}), 0) << err;
        EXPECT_NE(out.find("not authorized (expected)"), std::string::npos);
        EXPECT_EQ(out.substr(out.size() - std::string("decrypt OK\n").size()), "decrypt OK\n");
    }
}

TEST_F(Cli, BenchReportsMatchingCounts) {
    ASSERT_EQ(run({"--seed", "5", "bench", "--levels", "3", "--rows", "2", "--report", at("report.md")}), 0) << err;
    EXPECT_EQ(out.find("| NO |"), std::string::npos);
    EXPECT_NE(out.find("| delegate | 2 | 2 |"), std::string::npos);
    EXPECT_EQ(read_text_file(at("report.md")), out);
}
