#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "geosugg/text.hpp"

namespace geosugg {
namespace {

using Tokens = std::vector<std::string>;

TEST(NormalizeTest, LowercasesStripsPunctuationAndPlurals) {
    EXPECT_EQ(normalize("Parks near Turin!"), (Tokens{"park", "near", "turin"}));
}

TEST(NormalizeTest, EmptyInput) { EXPECT_TRUE(normalize("").empty()); }

TEST(NormalizeTest, NormalFormIsUnchanged) { EXPECT_EQ(normalize("park"), (Tokens{"park"})); }

TEST(NormalizeTest, SuffixTable) {
    EXPECT_EQ(normalize("cities libraries"), (Tokens{"city", "library"}));
    EXPECT_EQ(normalize("churches boxes classes"), (Tokens{"church", "box", "class"}));
    EXPECT_EQ(normalize("parking swimming shopping"), (Tokens{"park", "swim", "shop"}));
    // short or non-inflected words survive
    EXPECT_EQ(normalize("gas bus tennis glass spring king"),
              (Tokens{"gas", "bus", "tennis", "glass", "spring", "king"}));
    EXPECT_EQ(normalize("buildings"), (Tokens{"build"}));
}

TEST(NormalizeTest, SeparatorsAndApostrophes) {
    EXPECT_EQ(normalize("Regional_Park"), (Tokens{"regional", "park"}));
    EXPECT_EQ(normalize("macy's  store\tnyc"), (Tokens{"macy", "store", "nyc"}));
    EXPECT_EQ(normalize("--- !!"), Tokens{});
}

TEST(NormalizeTest, NonAsciiBytesKept) { EXPECT_EQ(normalize("Caf\xc3\xa9s"), (Tokens{"caf\xc3\xa9"})); }

std::string join(const Tokens& t) {
    std::string out;
    for (const auto& s : t) out += s + " ";
    return out;
}

TEST(NormalizeTest, IdempotentOnRandomText) {
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyzINGSE '.-_!";
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        std::string text;
        const int len = static_cast<int>(rng() % 40);
        for (int i = 0; i < len; ++i) text.push_back(alphabet[rng() % alphabet.size()]);
        const auto once = normalize(text);
        EXPECT_EQ(normalize(join(once)), once) << "input: " << text;
    }
}

}  // namespace
}  // namespace geosugg
