#include <gtest/gtest.h>

#include <random>

#include "opsteg/operator_scanner.hpp"
#include "opsteg/operator_table.hpp"
#include "support.hpp"

using namespace opsteg;
using opsteg::testing::error_of;

namespace {

constexpr ObjectId kOwner{4, 0};

std::vector<std::string> texts(const OperatorSite& site) {
    std::vector<std::string> out;
    for (const auto& s : site.operands) out.push_back(s.text);
    return out;
}

std::vector<std::string> ops(const StreamScan& scan) {
    std::vector<std::string> out;
    for (const auto& s : scan.sites) out.push_back(s.op_name);
    return out;
}

}  // namespace

TEST(Masks, PrintedForms) {
    EXPECT_EQ(masks::operator_mask("Td"), R"((?:[\d\.\-]+\s+){2,2}Td[\[\s])");
    EXPECT_EQ(masks::operator_mask("sc"), R"((?:[\d\.\-]+\s+){1,4}sc[\[\s])");
    EXPECT_EQ(operator_table().size(), 32u);
}

TEST(Scanner, ListingLine) {
    const auto scan = scan_stream("288 720 Td\n", kOwner);
    ASSERT_EQ(scan.sites.size(), 1u);
    EXPECT_EQ(scan.sites[0].op_name, "Td");
    EXPECT_EQ(texts(scan.sites[0]), (std::vector<std::string>{"288", "720"}));
    EXPECT_EQ(scan.sites[0].stream_owner, kOwner);
}

TEST(Scanner, EmptyStream) { EXPECT_TRUE(scan_stream("", kOwner).sites.empty()); }

TEST(Scanner, ListingStream) {
    const auto scan = scan_stream("BT\n/F1 12 Tf\n288 720 Td\n(ABC) Tj\nET\n", kOwner);
    EXPECT_EQ(ops(scan), (std::vector<std::string>{"Tf", "Td"}));
    EXPECT_EQ(texts(scan.sites[0]), (std::vector<std::string>{"12"}));
}

TEST(Scanner, OperatorsAtStreamEndNeedATrailingSeparator) {
    // The mask requires `[` or whitespace after the operator.
    EXPECT_TRUE(scan_stream("1 2 m", kOwner).sites.empty());
    EXPECT_EQ(scan_stream("1 2 m\n", kOwner).sites.size(), 1u);
}

TEST(Scanner, StringsAndNamesAreMasked) {
    const auto scan = scan_stream("(12 34 Td) Tj\n/Name5 6 w\n<31 32 Td> Tj\n% 7 8 m\n9 10 l\n", kOwner);
    ASSERT_EQ(ops(scan), (std::vector<std::string>{"w", "l"}));
    EXPECT_EQ(texts(scan.sites[0]), (std::vector<std::string>{"6"}));
}

TEST(Scanner, InlineImageIsMasked) {
    const auto scan = scan_stream("BI /W 1 /H 1 ID \x01\x02 3 4 m EI\n5 6 m\n", kOwner);
    ASSERT_EQ(scan.sites.size(), 1u);
    EXPECT_EQ(texts(scan.sites[0]), (std::vector<std::string>{"5", "6"}));
}

TEST(Scanner, TokenBoundaryIsRequired) {
    // `x1 2 m` has three tokens before m but `x1` is not numeric.
    const auto scan = scan_stream("x1 2 3 m\nab4 w\n", kOwner);
    ASSERT_EQ(scan.sites.size(), 1u);
    EXPECT_EQ(texts(scan.sites[0]), (std::vector<std::string>{"2", "3"}));
}

TEST(Scanner, SurplusOperandsKeepTheNearest) {
    const auto scan = scan_stream("1 2 3 4 5 m\n", kOwner);
    ASSERT_EQ(scan.sites.size(), 1u);
    EXPECT_EQ(texts(scan.sites[0]), (std::vector<std::string>{"4", "5"}));
    EXPECT_TRUE(scan_stream("1 re\n", kOwner).sites.empty());
}

TEST(Scanner, VariableArityColorOperators) {
    const auto scan = scan_stream("0.5 sc\n1 0 0 SC\n0.1 0.2 0.3 0.4 scn\n", kOwner);
    ASSERT_EQ(scan.sites.size(), 3u);
    EXPECT_EQ(scan.sites[0].operands.size(), 1u);
    EXPECT_EQ(scan.sites[1].operands.size(), 3u);
    EXPECT_EQ(scan.sites[2].operands.size(), 4u);
    EXPECT_EQ(scan.sites[2].op_name, "scn");
}

TEST(Scanner, TypeThreeOperatorsWithDigitsInTheirNames) {
    const auto scan = scan_stream("1000 0 d0\n1000 0 -100 -100 800 800 d1\n", kOwner);
    ASSERT_EQ(ops(scan), (std::vector<std::string>{"d0", "d1"}));
    EXPECT_EQ(texts(scan.sites[0]), (std::vector<std::string>{"1000", "0"}));
    EXPECT_EQ(texts(scan.sites[1]), (std::vector<std::string>{"1000", "0", "-100", "-100", "800", "800"}));
}

TEST(Scanner, OperatorFollowedByArray) {
    const auto scan = scan_stream("10 20 Td[(A)5] TJ\n", kOwner);
    ASSERT_EQ(ops(scan), (std::vector<std::string>{"Td", "TJ"}));
    EXPECT_EQ(texts(scan.sites[1]), (std::vector<std::string>{"5"}));
}

TEST(Scanner, TextArrays) {
    auto scan = scan_stream("[(H)50(e)] TJ\n", kOwner);
    ASSERT_EQ(scan.sites.size(), 1u);
    EXPECT_EQ(texts(scan.sites[0]), (std::vector<std::string>{"50"}));

    scan = scan_stream("[(A1)20(B3)-7(C)] TJ\n", kOwner);
    ASSERT_EQ(scan.sites.size(), 1u);
    EXPECT_EQ(texts(scan.sites[0]), (std::vector<std::string>{"20", "-7"}));

    scan = scan_stream("[<3132>4(x) 5 (y\\)9)] TJ\n", kOwner);
    ASSERT_EQ(scan.sites.size(), 1u);
    EXPECT_EQ(texts(scan.sites[0]), (std::vector<std::string>{"4", "5"}));

    scan = scan_stream("[(no numbers)] TJ\n", kOwner);
    ASSERT_EQ(scan.sites.size(), 1u);
    EXPECT_TRUE(scan.sites[0].operands.empty());

    // `TJregular` is not the operator
    EXPECT_TRUE(scan_stream("[(A)5] TJx\n", kOwner).sites.empty());
}

TEST(Scanner, ZeroOperandsAreSlots) {
    const auto scan = scan_stream("0 0 0 RG\n", kOwner);
    ASSERT_EQ(scan.sites.size(), 1u);
    ASSERT_EQ(scan.sites[0].operands.size(), 3u);
    for (const auto& s : scan.sites[0].operands) EXPECT_EQ(s.digits, "0");
}

TEST(Scanner, MalformedTokenDiscardsTheSite) {
    const auto scan = scan_stream("1 - w\n5 w\n1-2 w\n", kOwner);
    ASSERT_EQ(scan.sites.size(), 1u);
    EXPECT_EQ(texts(scan.sites[0]), (std::vector<std::string>{"5"}));
    EXPECT_EQ(scan.diagnostics.size(), 2u);
}

TEST(NumericToken, Forms) {
    auto s = parse_numeric_token("-0.866");
    ASSERT_TRUE(s);
    EXPECT_EQ(s->sign, -1);
    EXPECT_EQ(s->digits, "0866");
    EXPECT_EQ(s->frac_count, 3u);

    s = parse_numeric_token(".5");
    ASSERT_TRUE(s);
    EXPECT_EQ(s->digits, "5");
    EXPECT_EQ(s->frac_count, 1u);

    s = parse_numeric_token("5.");
    ASSERT_TRUE(s);
    EXPECT_EQ(s->digits, "5");
    EXPECT_EQ(s->frac_count, 0u);

    EXPECT_FALSE(parse_numeric_token("-"));
    EXPECT_FALSE(parse_numeric_token("."));
    EXPECT_FALSE(parse_numeric_token("1.2.3"));
    EXPECT_FALSE(parse_numeric_token("1-2"));
    EXPECT_FALSE(parse_numeric_token(""));
}

TEST(ExtractOperands, NoOperandsIsAnError) {
    EXPECT_EQ(error_of([] { extract_operands("Td ", "Td"); }), ErrorCode::NoOperands);
    EXPECT_TRUE(extract_operands("[(x)] TJ", "TJ").empty());
}

TEST(Splice, ReplacesOnlyTheSlot) {
    const std::string text = "/F1 12 Tf\n";
    const auto scan = scan_stream(text, kOwner);
    const auto& slot = scan.sites.at(0).operands.at(0);
    EXPECT_EQ(splice_operand(text, slot, "12.01"), "/F1 12.01 Tf\n");
    EXPECT_EQ(splice_operand(text, slot, slot.text), text);

    const std::string ninety_eight = "98.0 w\n";
    const auto s2 = scan_stream(ninety_eight, kOwner).sites.at(0).operands.at(0);
    const auto out = splice_operand(ninety_eight, s2, "98.1");
    ASSERT_EQ(out.size(), ninety_eight.size());
    std::size_t diffs = 0;
    for (std::size_t i = 0; i < out.size(); ++i) diffs += out[i] != ninety_eight[i];
    EXPECT_EQ(diffs, 1u);
    EXPECT_EQ(out[3], '1');

    OperandSlot bad = slot;
    bad.span = {8, 40};
    EXPECT_EQ(error_of([&] { splice_operand(text, bad, "1"); }), ErrorCode::SpanOutOfRange);
}

TEST(ScannerProperties, RandomStreams) {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 40; ++round) {
        const auto text = opsteg::testing::random_fixture_text(rng, 80);
        const auto scan = scan_stream(text, kOwner);
        const auto again = scan_stream(text, kOwner);
        ASSERT_EQ(scan.sites.size(), again.sites.size());

        // String regions, computed by a plain walk.
        std::vector<std::pair<std::size_t, std::size_t>> strings;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '%') {
                while (i < text.size() && text[i] != '\n') ++i;
            } else if (text[i] == '(') {
                const auto start = i;
                int depth = 0;
                for (; i < text.size(); ++i) {
                    if (text[i] == '\\') {
                        ++i;
                    } else if (text[i] == '(') {
                        ++depth;
                    } else if (text[i] == ')' && --depth == 0) {
                        break;
                    }
                }
                strings.emplace_back(start, i + 1);
            } else if (text[i] == '<') {
                const auto start = i;
                i = text.find('>', i);
                strings.emplace_back(start, i + 1);
            }
        }

        std::size_t prev_end = 0;
        for (std::size_t k = 0; k < scan.sites.size(); ++k) {
            const auto& site = scan.sites[k];
            EXPECT_EQ(site.op_name, again.sites[k].op_name);
            EXPECT_EQ(site.source_order, k);
            EXPECT_GE(site.match_span.begin, prev_end);
            prev_end = site.match_span.end;
            const auto* arity = find_operator(site.op_name);
            ASSERT_NE(arity, nullptr);
            if (site.op_name != "TJ") {
                EXPECT_GE(site.operands.size(), arity->min_operands);
                EXPECT_LE(site.operands.size(), arity->max_operands);
            }
            for (const auto& slot : site.operands) {
                EXPECT_EQ(text.substr(slot.span.begin, slot.span.end - slot.span.begin), slot.text);
                EXPECT_LE(slot.frac_count, slot.digits.size());
                EXPECT_EQ(slot.digits.find_first_not_of("0123456789"), std::string::npos);
                for (const auto& [b, e] : strings) {
                    EXPECT_FALSE(slot.span.begin >= b && slot.span.begin < e) << slot.text << " inside a string";
                }
            }
        }
    }
}
