#include <gtest/gtest.h>

#include <filesystem>
#include <limits>

#include "cmacg/io.hpp"
#include "oracles.hpp"

using namespace cmacg;
namespace fs = std::filesystem;

namespace {

ComplexMatrix awkward_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& gen) {
    std::uniform_real_distribution<double> expo(-300.0, 300.0);
    std::normal_distribution<double> nd;
    ComplexMatrix a(rows, cols);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a.data()[i] = Complex(nd(gen) * std::pow(10.0, expo(gen)), nd(gen));
    a(0, 0) = Complex(std::numeric_limits<double>::denorm_min(), -0.0);
    return a;
}

} // namespace

TEST(Csv, LayoutIsReImPairs) {
    ComplexMatrix a(2, 2);
    a << Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(0.5, -0.25);
    EXPECT_EQ(io::matrix_to_csv(a), "1,2,3,4\n5,6,0.5,-0.25\n");
    EXPECT_EQ(io::draws_to_csv({a, a}), "0,1,2,3,4\n0,5,6,0.5,-0.25\n1,1,2,3,4\n1,5,6,0.5,-0.25\n");
    EXPECT_EQ(io::draws_to_json({a}), "[[[[1.0,2.0],[3.0,4.0]],[[5.0,6.0],[0.5,-0.25]]]]\n");
}

TEST(Csv, RoundTripIsBitExact) {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index rows = 1 + trial % 5, cols = 1 + trial % 3;
        std::vector<ComplexMatrix> draws;
        for (int k = 0; k < 4; ++k) draws.push_back(awkward_matrix(rows, cols, gen));

        EXPECT_EQ(io::matrix_from_csv(io::matrix_to_csv(draws[0])), draws[0]);
        EXPECT_EQ(io::draws_from_csv(io::draws_to_csv(draws), rows, cols), draws);
        EXPECT_EQ(io::draws_from_json(io::draws_to_json(draws), rows, cols), draws);
        EXPECT_EQ(io::read_matrix(io::write_matrix(draws[1], io::Format::Json), io::Format::Json), draws[1]);
    }
}

TEST(Csv, CommentsBlankLinesAndCrlf) {
    const ComplexMatrix a = io::matrix_from_csv("# P\n\n 2, 0 ,0,0\r\n0,0,1,0\n");
    EXPECT_EQ(a.rows(), 2);
    EXPECT_EQ(a(0, 0), Complex(2, 0));
    EXPECT_EQ(a(1, 1), Complex(1, 0));
}

TEST(Csv, ParseErrors) {
    auto code = [](auto f) {
        try {
            f();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    EXPECT_EQ(code([] { io::matrix_from_csv("1,2,x,4\n"); }), ErrorCode::ParseError);
    EXPECT_EQ(code([] { io::matrix_from_csv("1,2,3\n"); }), ErrorCode::ParseError);
    EXPECT_EQ(code([] { io::matrix_from_csv("1,2\n1,2,3,4\n"); }), ErrorCode::ParseError);
    EXPECT_EQ(code([] { io::matrix_from_csv(""); }), ErrorCode::ParseError);
    EXPECT_EQ(code([] { io::draws_from_csv("0,1,0\n2,0,1\n", 2, 1); }), ErrorCode::ParseError);
    EXPECT_EQ(code([] { io::draws_from_csv("0,1,0\n", 2, 1); }), ErrorCode::ParseError);
    EXPECT_EQ(code([] { io::draws_from_json("[[[[1,0]]]]", 2, 1); }), ErrorCode::ParseError);
    EXPECT_EQ(code([] { io::draws_from_json("{", 1, 1); }), ErrorCode::ParseError);
    EXPECT_EQ(code([] { io::matrix_from_json(nlohmann::json::parse("[[[1]]]")); }), ErrorCode::ParseError);
}

TEST(Sha256, KnownVectors) {
    EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Files, AtomicWriteReplacesContent) {
    const fs::path dir = fs::temp_directory_path() / "cmacg_io_test";
    fs::create_directories(dir);
    const fs::path f = dir / "x.csv";
    io::write_file_atomic(f, "first\n");
    io::write_file_atomic(f, "second\n");
    EXPECT_EQ(io::read_file(f), "second\n");
    EXPECT_FALSE(fs::exists(dir / "x.csv.tmp"));
    EXPECT_THROW(io::read_file(dir / "missing.csv"), Error);
    EXPECT_EQ(io::format_from_extension("a.json"), io::Format::Json);
    EXPECT_EQ(io::format_from_extension("a.csv"), io::Format::Csv);
    fs::remove_all(dir);
}
