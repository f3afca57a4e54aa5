#include "archeval/text.hpp"

#include "doctest.h"

using namespace archeval;

TEST_CASE("normalize_name lowercases and collapses separators") {
    CHECK(text::normalize_name("Application Layer") == "application layer");
    CHECK(text::normalize_name("  Business--Logic   Layer ") == "business logic layer");
    CHECK(text::normalize_name("Pr\xC3\xA4sentation") == "pr\xC3\xA4sentation");
    CHECK(text::normalize_name("PR\xC3\x84SENTATION") == "pr\xC3\xA4sentation");
    CHECK(text::normalize_name("<<component>> MySQL-DB") == "mysql db");
    CHECK(text::normalize_name("\xC2\xABinterface\xC2\xBB Core") == "core");
}

TEST_CASE("normalize_name composes decomposed umlauts") {
    // "a" + combining diaeresis folds to the precomposed form
    CHECK(text::normalize_name("Pra\xCC\x88sentation") == "pr\xC3\xA4sentation");
}

TEST_CASE("split_words handles camelCase and acronym runs") {
    CHECK(text::split_words("UserService") == std::vector<std::string>{"user", "service"});
    CHECK(text::split_words("MySQL") == std::vector<std::string>{"mysql"});
    CHECK(text::split_words("HTTPServer") == std::vector<std::string>{"http", "server"});
    CHECK(text::split_words("S3Bucket") == std::vector<std::string>{"s3", "bucket"});
    CHECK(text::split_words("snake_case-kebab") ==
          std::vector<std::string>{"snake", "case", "kebab"});
}

TEST_CASE("utf8 decoding is total on malformed bytes") {
    std::string garbage = "\xFF\xFE\x80 ok \xC3";
    auto cps = text::decode_utf8(garbage);
    CHECK(!cps.empty());
    CHECK(text::normalize_name(garbage) == "ok");
}
