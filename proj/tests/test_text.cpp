#include <algorithm>
#include <array>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "readlm/text.hpp"
#include "test_util.hpp"

using namespace readlm;
using text::StopwordList;
using text::tokenize;
using testutil::TempDir;
using testutil::throws_with;
using testutil::write_file;

namespace {

using Tokens = std::vector<std::string>;

// Reference tokenizer for ASCII inputs, written against the stated rules
// rather than the production code: whitespace split via istream, regexes
// for the URL / currency / number categories, and the ASCII code points
// whose Unicode category is punctuation (P*). '$' '+' '<' '=' '>' '^' '`'
// '|' '~' are symbols (S*), not punctuation, and must survive stripping.
Tokens regex_tokenize(const std::string& raw) {
    static const std::regex url(R"(^(https?://|www\.).*)");
    static const std::regex currency(R"(^\$.*)");
    static const std::regex number(R"(^[0-9]+$)");
    static const std::string punct = "!\"#%&'()*,-./:;?@[\\]_{}";

    Tokens out;
    std::istringstream ss(raw);
    std::string tok;
    while (ss >> tok) {
        for (char& c : tok)
            if (c >= 'A' && c <= 'Z') c += 0x20;
        if (std::regex_match(tok, url)) continue;
        std::string stripped;
        for (char c : tok)
            if (punct.find(c) == std::string::npos) stripped += c;
        if (stripped.empty()) continue;
        if (std::regex_match(stripped, currency)) continue;
        if (std::regex_match(stripped, number)) continue;
        out.push_back(stripped);
    }
    return out;
}

std::string join(const Tokens& tokens) {
    std::string s;
    for (const auto& t : tokens) {
        if (!s.empty()) s += ' ';
        s += t;
    }
    return s;
}

std::string random_sentence(std::mt19937_64& rng) {
    static const std::array<std::string, 28> pieces = {
        "Cat",     "doG",       "HELLO",     "world", "it's",    "re-use",  "end.",
        "(maybe)", "what?!",    "a+b",       "x=y",   "5",       "123",     "3.14",
        "1,000",   "12.0.1",    "$5",        "$9.99", "!!!",     "--",      "...",
        "don't",   "mid,comma", "http://x.y/z",       "https://a.b",        "www.site.org",
        "Mixed5x", "semi;colon"};
    const std::size_t n = 1 + rng() % 12;
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) s += (rng() % 5 == 0) ? "  " : " ";
        s += pieces[rng() % pieces.size()];
    }
    return s;
}

bool is_subsequence(const Tokens& sub, const Tokens& full) {
    std::size_t i = 0;
    for (const auto& t : full)
        if (i < sub.size() && sub[i] == t) ++i;
    return i == sub.size();
}

}  // namespace

TEST_CASE("tokenize lowercases and strips punctuation") {
    CHECK(tokenize("The Cat, sat!") == Tokens{"the", "cat", "sat"});
    CHECK(tokenize("Hello") == Tokens{"hello"});
    CHECK(tokenize("don't stop") == Tokens{"dont", "stop"});
}

TEST_CASE("tokenize on empty and blank input") {
    CHECK(tokenize("").empty());
    CHECK(tokenize("   \t  \n ").empty());
    CHECK(tokenize("!!! ... ,").empty());
}

TEST_CASE("tokenize drops urls, currency, and numbers") {
    CHECK(tokenize("Visit http://a.example NOW for $5 5 times") ==
          Tokens{"visit", "now", "for", "times"});
    CHECK(tokenize("see www.example.com or https://b.example today") ==
          Tokens{"see", "or", "today"});
    CHECK(tokenize("pay 3.14 then 1,000 coins") == Tokens{"pay", "then", "coins"});
    CHECK(tokenize("room 12b holds 12") == Tokens{"room", "12b", "holds"});
}

TEST_CASE("tokenize keeps symbol characters that are not punctuation") {
    CHECK(tokenize("a+b x=y 2<3") == Tokens{"a+b", "x=y", "2<3"});
}

TEST_CASE("tokenize handles non-ascii punctuation and currency") {
    CHECK(tokenize("naïve “quote” café — done") ==
          Tokens{"naïve", "quote", "café", "done"});
    CHECK(tokenize("costs £5 or €9 total") == Tokens{"costs", "or", "total"});
    CHECK(tokenize("wide　space") == Tokens{"wide", "space"});
}

TEST_CASE("tokenize matches the regex reference on random ascii text") {
    std::mt19937_64 rng(20260401);
    for (int trial = 0; trial < 400; ++trial) {
        const std::string s = random_sentence(rng);
        CAPTURE(s);
        CHECK(tokenize(s) == regex_tokenize(s));
    }
}

TEST_CASE("tokenize is idempotent") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::string s = random_sentence(rng);
        const Tokens once = tokenize(s);
        CAPTURE(s);
        CHECK(tokenize(join(once)) == once);
    }
}

TEST_CASE("remove_stopwords filters exactly the listed words") {
    const auto stops = StopwordList::from_words(std::array<std::string, 2>{"the", "a"});
    CHECK(text::remove_stopwords({"the", "cat"}, stops) == Tokens{"cat"});
    CHECK(text::remove_stopwords({"cat"}, StopwordList()) == Tokens{"cat"});

    const auto ac = StopwordList::from_words(std::array<std::string, 2>{"a", "c"});
    CHECK(text::remove_stopwords({"a", "b", "a", "c"}, ac) == Tokens{"b"});
}

TEST_CASE("remove_stopwords yields a stop-free subsequence") {
    std::mt19937_64 rng(99);
    const std::array<std::string, 6> vocab = {"a", "b", "c", "d", "the", "of"};
    const auto stops = StopwordList::from_words(std::array<std::string, 3>{"the", "of", "a"});
    for (int trial = 0; trial < 100; ++trial) {
        Tokens input;
        const std::size_t n = rng() % 20;
        for (std::size_t i = 0; i < n; ++i) input.push_back(vocab[rng() % vocab.size()]);
        const Tokens filtered = text::remove_stopwords(input, stops);
        CHECK(is_subsequence(filtered, input));
        for (const auto& t : filtered) CHECK_FALSE(stops.contains(t));
        CHECK(text::remove_stopwords(filtered, stops) == filtered);
    }
}

TEST_CASE("stopword list normalizes entries") {
    const auto stops =
        StopwordList::from_words(std::array<std::string, 3>{"The", "  a ", ""});
    CHECK(stops.size() == 2);
    CHECK(stops.contains("the"));
    CHECK(stops.contains("a"));
    CHECK_FALSE(stops.contains("The"));
}

TEST_CASE("builtin stopword list covers common function words") {
    const auto stops = StopwordList::builtin_english();
    CHECK(stops.size() > 100);
    for (const char* w : {"the", "and", "of", "is", "to"}) CHECK(stops.contains(w));
    CHECK_FALSE(stops.contains("government"));
}

TEST_CASE("stopword list loads from file") {
    TempDir dir;
    write_file(dir.file("stops.txt"), "The\nof\n\nAND\n");
    const auto stops = StopwordList::from_file(dir.file("stops.txt"));
    CHECK(stops.size() == 3);
    CHECK(stops.contains("the"));
    CHECK(stops.contains("of"));
    CHECK(stops.contains("and"));
    CHECK_THROWS_AS(StopwordList::from_file(dir.file("missing.txt")), IoError);
}

TEST_CASE("load_corpus reads labeled documents") {
    TempDir dir;
    std::filesystem::create_directories(dir.file("corpus"));
    write_file(dir.file("corpus/a.txt"), "Cat sat");
    write_file(dir.file("labels.tsv"), "a.txt\t2.5\n");

    const auto corpus = text::load_corpus(dir.file("corpus"), dir.file("labels.tsv"));
    REQUIRE(corpus.documents.size() == 1);
    CHECK(corpus.documents[0].id == "a.txt");
    CHECK(corpus.documents[0].tokens == Tokens{"cat", "sat"});
    REQUIRE(corpus.documents[0].label.has_value());
    CHECK(*corpus.documents[0].label == 2.5);
}

TEST_CASE("load_corpus on an empty directory") {
    TempDir dir;
    std::filesystem::create_directories(dir.file("corpus"));
    const auto corpus = text::load_corpus(dir.file("corpus"));
    CHECK(corpus.documents.empty());
}

TEST_CASE("load_corpus orders by filename and never invents labels") {
    TempDir dir;
    std::filesystem::create_directories(dir.file("corpus"));
    write_file(dir.file("corpus/c.txt"), "gamma");
    write_file(dir.file("corpus/a.txt"), "alpha");
    write_file(dir.file("corpus/b.txt"), "beta");
    write_file(dir.file("corpus/notes.md"), "ignored");
    write_file(dir.file("labels.tsv"), "b.txt\t4.5\n");

    const auto corpus = text::load_corpus(dir.file("corpus"), dir.file("labels.tsv"));
    REQUIRE(corpus.documents.size() == 3);
    CHECK(corpus.documents[0].id == "a.txt");
    CHECK(corpus.documents[1].id == "b.txt");
    CHECK(corpus.documents[2].id == "c.txt");
    CHECK_FALSE(corpus.documents[0].label.has_value());
    CHECK(corpus.documents[1].label == 4.5);
    CHECK_FALSE(corpus.documents[2].label.has_value());
}

TEST_CASE("load_corpus applies the stopword filter") {
    TempDir dir;
    std::filesystem::create_directories(dir.file("corpus"));
    write_file(dir.file("corpus/a.txt"), "the cat sat");
    const auto stops = StopwordList::from_words(std::array<std::string, 1>{"the"});
    const auto corpus = text::load_corpus(dir.file("corpus"), std::nullopt, stops);
    REQUIRE(corpus.documents.size() == 1);
    CHECK(corpus.documents[0].tokens == Tokens{"cat", "sat"});
}

TEST_CASE("load_corpus error contracts") {
    TempDir dir;
    std::filesystem::create_directories(dir.file("corpus"));
    write_file(dir.file("corpus/a.txt"), "cat");

    CHECK_THROWS_AS(text::load_corpus(dir.file("no-such-dir")), IoError);

    write_file(dir.file("bad.tsv"), "b.txt\t4.5\n");
    CHECK(throws_with<ValidationError>(
        [&] { text::load_corpus(dir.file("corpus"), dir.file("bad.tsv")); }, "b.txt"));

    write_file(dir.file("nolabel.tsv"), "a.txt\tnot-a-number\n");
    CHECK_THROWS_AS(text::load_corpus(dir.file("corpus"), dir.file("nolabel.tsv")),
                    ValidationError);

    write_file(dir.file("notab.tsv"), "a.txt 2.5\n");
    CHECK_THROWS_AS(text::load_corpus(dir.file("corpus"), dir.file("notab.tsv")),
                    ValidationError);
}
