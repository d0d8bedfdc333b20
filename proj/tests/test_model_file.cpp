#include <gtest/gtest.h>

#include <random>

#include "mixtopo/error.hpp"
#include "mixtopo/keyvalue.hpp"
#include "mixtopo/model_file.hpp"

using namespace mixtopo;

namespace {

int error_line(std::string_view text) {
    try {
        parse_model(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

void expect_same_hamiltonian(const BlochModel& a, const BlochModel& b) {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(-kPi, kPi);
    for (int i = 0; i < 20; ++i) {
        const KPoint k{u(g), u(g)};
        EXPECT_LT(distance(a.hamiltonian(k), b.hamiltonian(k)), 1e-14);
    }
}

}  // namespace

TEST(ModelFile, BuiltinWithOverrides) {
    const BlochModel m = parse_model("builtin = \"aniso-qah\"\na2 = -3   # flipped\n");
    EXPECT_EQ(m.name(), "aniso-qah");
    expect_same_hamiltonian(m, BlochModel::aniso_qah({1.0, -3.0, 1.0}));
}

TEST(ModelFile, FourierTableMatchesBuiltin) {
    const BlochModel m = parse_model(R"(
name = "table"
term = d1, sin, 1, 0, 1.0
term = d2, sin, 0, 1, 3.0
term = d3, cos, 0, 0, 1.0
term = d3, cos, 1, 0, -1.0
term = z,  cos, 0, 1, -1.0
)");
    EXPECT_EQ(m.name(), "table");
    ASSERT_TRUE(m.dvector().has_value());
    expect_same_hamiltonian(m, BlochModel::aniso_qah());
}

TEST(ModelFile, ShippedModelFilesLoad) {
    const std::string dir = MIXTOPO_SOURCE_DIR "/configs/";
    expect_same_hamiltonian(load_model_file(dir + "aniso_qah.model"), BlochModel::aniso_qah());
    expect_same_hamiltonian(load_model_file(dir + "aniso_qah_terms.model"), BlochModel::aniso_qah());
}

TEST(ModelFile, ResolveBuiltinAliases) {
    for (const char* s : {"builtin", "aniso-qah", "builtin:aniso-qah"}) EXPECT_EQ(resolve_model(s).name(), "aniso-qah");
    EXPECT_THROW(resolve_model("/nonexistent/model.txt"), ParseError);
}

TEST(ModelFile, ErrorsCiteRowNumbers) {
    EXPECT_EQ(error_line("builtin = aniso-qah\n\nbogus = 1\n"), 3);
    EXPECT_EQ(error_line("term = d1, sin, 1, 0, 1\nterm = d4, sin, 1, 0, 1\n"), 2);
    EXPECT_EQ(error_line("term = d1, tan, 1, 0, 1\n"), 1);
    EXPECT_EQ(error_line("# header\nterm = d1, sin, 1, 0\n"), 2);
    EXPECT_EQ(error_line("term = d1, sin, 1.5, 0, 1\n"), 1);
    EXPECT_EQ(error_line("term = d1, sin, 1, 0, abc\n"), 1);
    EXPECT_EQ(error_line("builtin = aniso-qah\nterm = d1, sin, 1, 0, 1\n"), 2);
    EXPECT_EQ(error_line("builtin = other\n"), 1);
    EXPECT_EQ(error_line("term = d1, sin, 1, 0, 1\nm = 2\n"), 2);
    EXPECT_EQ(error_line("name = \"x\"\nno equals sign\n"), 2);
    EXPECT_EQ(error_line("name = \"unterminated\n"), 1);
    EXPECT_THROW(parse_model("# empty\n"), ParseError);
}

TEST(KeyValue, CommentsQuotesAndRepeats) {
    const auto doc = KeyValueDoc::parse("a = 1\nb = \"x # not a comment\"  # comment\na = 2\n");
    ASSERT_EQ(doc.all("a").size(), 2u);
    EXPECT_EQ(doc.find("a")->value, "2");
    EXPECT_EQ(doc.find("a")->line, 3);
    EXPECT_EQ(doc.find("b")->value, "x # not a comment");
    EXPECT_EQ(doc.find("c"), nullptr);
}

TEST(KeyValue, StrictNumbers) {
    EXPECT_DOUBLE_EQ(parse_double(" 1.5e-3 ", 1, "f"), 1.5e-3);
    EXPECT_THROW(parse_double("1.5x", 1, "f"), ParseError);
    EXPECT_THROW(parse_double("", 1, "f"), ParseError);
    EXPECT_EQ(parse_long("-42", 1, "f"), -42);
    EXPECT_THROW(parse_long("4.0", 1, "f"), ParseError);
    EXPECT_EQ(split_list(" 1, 2 ,\"3\""), (std::vector<std::string>{"1", "2", "3"}));
}
