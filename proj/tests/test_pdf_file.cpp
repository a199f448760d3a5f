#include <gtest/gtest.h>
#include <zlib.h>

#include <random>

#include "opsteg/fixture.hpp"
#include "opsteg/pdf_file.hpp"
#include "support.hpp"

using namespace opsteg;
using opsteg::testing::audit_structure;
using opsteg::testing::error_of;
using opsteg::testing::raw_pdf;

namespace {

const char* kListing =
    "<< /Length 44 >>\n"
    "stream\n"
    "BT\n/F1 12 Tf\n288 720 Td\n(ABC) Tj\nET\n"
    "endstream";

std::string zlib_compress(std::string_view text) {
    uLongf size = compressBound(static_cast<uLong>(text.size()));
    std::string out(size, '\0');
    compress2(reinterpret_cast<Bytef*>(out.data()), &size, reinterpret_cast<const Bytef*>(text.data()),
              static_cast<uLong>(text.size()), 9);
    out.resize(size);
    return out;
}

std::string stream_body(std::string_view dict_extra, std::string_view data) {
    return "<< /Length " + std::to_string(data.size()) + " " + std::string(dict_extra) + " >>\nstream\n" +
           std::string(data) + "\nendstream";
}

PdfDocument one_page(std::string_view contents_body, std::string_view contents_ref = "4 0 R") {
    return parse_document(raw_pdf({"<< /Type /Catalog /Pages 2 0 R >>", "<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
                                   "<< /Type /Page /Parent 2 0 R /Contents " + std::string(contents_ref) + " >>",
                                   std::string(contents_body)}));
}

}  // namespace

TEST(PdfFile, ListingObjectParsesWithItsStream) {
    const auto doc = parse_document("%PDF-1.4\n8 0 obj\n" + std::string(kListing) + "\nendobj\ntrailer\n<< >>\n%%EOF\n");
    ASSERT_EQ(doc.objects.size(), 1u);
    EXPECT_EQ(doc.objects[0].id, (ObjectId{8, 0}));
    ASSERT_TRUE(doc.objects[0].is_stream());
    EXPECT_NE(doc.objects[0].stream_bytes->find("(ABC) Tj"), std::string::npos);
    EXPECT_EQ(doc.header_version, "1.4");
}

TEST(PdfFile, HeaderAndBalanceErrors) {
    EXPECT_EQ(error_of([] { parse_document(""); }), ErrorCode::MalformedHeader);
    EXPECT_EQ(error_of([] { parse_document("hello"); }), ErrorCode::MalformedHeader);
    EXPECT_EQ(error_of([] { parse_document("%PDF-1.7\n1 0 obj\n<< /A 1 >>\n2 0 obj\n3\nendobj\n"); }),
              ErrorCode::UnbalancedObject);
    EXPECT_EQ(error_of([] { parse_document(raw_pdf({"<< /Type /ObjStm /N 0 /First 0 /Length 0 >>\nstream\n\nendstream"})); }),
              ErrorCode::ObjectStreamsPresent);
    EXPECT_EQ(error_of([] { parse_document(raw_pdf({"<< /Type /Catalog >>"}, "/Encrypt << /V 1 >>")); }),
              ErrorCode::EncryptedDocument);
}

TEST(PdfFile, LatestRevisionWins) {
    std::string pdf = raw_pdf({"<< /Type /Catalog /V 1 >>"});
    pdf += "1 0 obj\n<< /Type /Catalog /V 2 >>\nendobj\ntrailer\n<< /Root 1 0 R >>\n%%EOF\n";
    const auto doc = parse_document(pdf);
    ASSERT_EQ(doc.objects.size(), 1u);
    EXPECT_EQ(*dict_find(*doc.objects[0].dict(), "V")->integer(), 2);
}

TEST(PdfFile, XrefStreamInputIsRewrittenAsClassicTable) {
    const auto doc = parse_document(raw_pdf(
        {"<< /Type /Catalog >>", "<< /Type /XRef /Root 1 0 R /Size 3 /W [1 2 1] /Length 0 >>\nstream\n\nendstream"}, ""));
    const auto out = serialize_document(doc);
    EXPECT_EQ(out.find("/XRef"), std::string::npos);
    const auto audit = audit_structure(out);
    EXPECT_TRUE(audit.ok) << audit.problem;
    EXPECT_NE(out.find("/Root 1 0 R"), std::string::npos);
}

TEST(PdfFile, ContentStreamRolesAndOrder) {
    const auto spec = parse_fixture_spec("pages 2\n10 20 m\nform\n1 2 l\ncharproc\n1000 0 d0\n");
    const auto doc = parse_document(build_fixture(spec));
    const auto cs = collect_content_streams(doc);
    ASSERT_EQ(cs.streams.size(), 4u);
    EXPECT_EQ(cs.streams[0].role, StreamRole::PageContents);
    EXPECT_EQ(cs.streams[1].role, StreamRole::PageContents);
    EXPECT_EQ(cs.streams[2].role, StreamRole::FormXObject);
    EXPECT_EQ(cs.streams[3].role, StreamRole::Type3CharProc);
    for (std::size_t k = 1; k < cs.streams.size(); ++k) {
        EXPECT_LT(doc.find(cs.streams[k - 1].owner)->byte_offset, doc.find(cs.streams[k].owner)->byte_offset);
    }
    EXPECT_TRUE(cs.skipped.empty());
}

TEST(PdfFile, ContentsArrayKeepsArrayOrder) {
    const auto doc = parse_document(raw_pdf({"<< /Type /Catalog /Pages 2 0 R >>", "<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
                                             "<< /Type /Page /Parent 2 0 R /Contents [6 0 R 4 0 R 5 0 R] >>",
                                             stream_body("", "1 0 0 RG"), stream_body("", "2 w"),
                                             stream_body("", "3 0 m")}));
    const auto cs = collect_content_streams(doc);
    ASSERT_EQ(cs.streams.size(), 3u);
    // ascending byte offset of the owners
    EXPECT_EQ(cs.streams[0].owner.number, 4u);
    EXPECT_EQ(cs.streams[1].owner.number, 5u);
    EXPECT_EQ(cs.streams[2].owner.number, 6u);
}

TEST(PdfFile, ImageStreamIsSkippedWithDiagnostic) {
    const auto doc = parse_document(raw_pdf({"<< /Type /Catalog >>",
                                             stream_body("/Type /XObject /Subtype /Image /Filter /DCTDecode", "\xFF\xD8\xFF")}));
    const auto cs = collect_content_streams(doc);
    EXPECT_TRUE(cs.streams.empty());
    EXPECT_EQ(cs.skipped.size(), 1u);
}

TEST(PdfFile, DecodeFilters) {
    const std::string text = "BT /F1 12 Tf ET";
    auto plain = one_page(stream_body("", text));
    EXPECT_EQ(decode_stream(plain, *plain.find({4, 0})), text);

    auto flate = one_page(stream_body("/Filter /FlateDecode", zlib_compress(text)));
    EXPECT_EQ(decode_stream(flate, *flate.find({4, 0})), text);
    auto flate_array = one_page(stream_body("/Filter [/FlateDecode]", zlib_compress(text)));
    EXPECT_EQ(decode_stream(flate_array, *flate_array.find({4, 0})), text);

    auto dct = one_page(stream_body("/Filter /DCTDecode", "xx"));
    EXPECT_EQ(error_of([&] { decode_stream(dct, *dct.find({4, 0})); }), ErrorCode::UnsupportedFilter);
    auto predictor = one_page(stream_body("/Filter /FlateDecode /DecodeParms << /Predictor 12 >>", zlib_compress(text)));
    EXPECT_EQ(error_of([&] { decode_stream(predictor, *predictor.find({4, 0})); }), ErrorCode::UnsupportedFilter);
    auto corrupt = one_page(stream_body("/Filter /FlateDecode", "not zlib at all"));
    EXPECT_EQ(error_of([&] { decode_stream(corrupt, *corrupt.find({4, 0})); }), ErrorCode::CorruptStream);
    auto truncated = one_page(stream_body("/Filter /FlateDecode", zlib_compress(text).substr(0, 6)));
    EXPECT_EQ(error_of([&] { decode_stream(truncated, *truncated.find({4, 0})); }), ErrorCode::CorruptStream);
}

TEST(PdfFile, EncodeIsLosslessUpToOneMebibyte) {
    std::mt19937_64 rng(7);
    for (std::size_t size : {0u, 1u, 4096u, 1u << 20}) {
        const auto bytes = opsteg::testing::random_bytes(rng, size);
        EXPECT_EQ(encode_stream(bytes, {}), bytes);
        const auto packed = encode_stream(bytes, {"FlateDecode"});
        auto doc = one_page(stream_body("/Filter /FlateDecode", packed));
        EXPECT_EQ(decode_stream(doc, *doc.find({4, 0})), bytes) << size;
    }
    EXPECT_EQ(error_of([] { encode_stream("x", {"DCTDecode"}); }), ErrorCode::UnsupportedFilter);
    EXPECT_EQ(error_of([] { encode_stream("x", {"FlateDecode", "FlateDecode"}); }), ErrorCode::UnsupportedFilter);
}

TEST(PdfFile, ReplaceStreamUpdatesLength) {
    auto doc = one_page(stream_body("", std::string(100, 'a')));
    doc = replace_stream(std::move(doc), {4, 0}, std::string(120, 'b'));
    const auto out = serialize_document(doc);
    EXPECT_NE(out.find("/Length 120"), std::string::npos);
    EXPECT_TRUE(audit_structure(out).ok);
    EXPECT_EQ(error_of([&] { doc.replace_stream({99, 0}, "x"); }), ErrorCode::UnknownObject);
}

TEST(PdfFile, ReplaceStreamFollowsIndirectLength) {
    auto doc = parse_document(raw_pdf({"<< /Type /Catalog /Pages 2 0 R >>", "<< /Type /Pages /Kids [3 0 R] /Count 1 >>",
                                       "<< /Type /Page /Parent 2 0 R /Contents 4 0 R >>",
                                       "<< /Length 5 0 R >>\nstream\n1 2 m\nendstream", "5"}));
    doc.replace_stream({4, 0}, "10 20 m 30 40 l");
    const auto out = serialize_document(doc);
    const auto audit = audit_structure(out);
    EXPECT_TRUE(audit.ok) << audit.problem;
    EXPECT_NE(out.find("5 0 obj\n15"), std::string::npos);
    EXPECT_NE(out.find("/Length 5 0 R"), std::string::npos);
}

TEST(PdfFile, FlateReplaceRoundTrips) {
    auto doc = parse_document(build_fixture(parse_fixture_spec("flate\n288 720 Td\n")));
    const auto owner = collect_content_streams(doc).streams.at(0).owner;
    doc.replace_stream(owner, "288.5 720 Td\n");
    const auto again = parse_document(serialize_document(doc));
    EXPECT_EQ(collect_content_streams(again).streams.at(0).decoded_bytes, "288.5 720 Td\n");
}

TEST(PdfFile, NoOpReplaceIsByteIdentical) {
    const auto bytes = build_fixture(parse_fixture_spec("pages 2\n1 2 3 4 re\n"));
    auto doc = parse_document(bytes);
    for (const auto& s : collect_content_streams(doc).streams) doc.replace_stream(s.owner, s.decoded_bytes);
    EXPECT_EQ(serialize_document(doc), bytes);
}

TEST(PdfFile, SerializeRoundTripPreservesModel) {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 5; ++k) {
        const auto bytes = build_fixture(parse_fixture_spec(opsteg::testing::random_fixture_text(rng, 40)));
        const auto first = parse_document(bytes);
        const auto second = parse_document(serialize_document(first));
        ASSERT_EQ(first.objects.size(), second.objects.size());
        for (std::size_t i = 0; i < first.objects.size(); ++i) {
            EXPECT_EQ(first.objects[i].id, second.objects[i].id);
            EXPECT_EQ(first.objects[i].value, second.objects[i].value);
            EXPECT_EQ(first.objects[i].stream_bytes, second.objects[i].stream_bytes);
        }
        const auto audit = audit_structure(serialize_document(second));
        EXPECT_TRUE(audit.ok) << audit.problem;
        EXPECT_EQ(serialize_document(second), bytes);
    }
}

TEST(PdfFile, MinimalDocumentEndsWithEof) {
    const auto out = serialize_document(parse_document(raw_pdf({"<< /Type /Catalog >>"})));
    EXPECT_TRUE(out.ends_with("%%EOF\n"));
    EXPECT_TRUE(audit_structure(out).ok);
}

TEST(PdfFile, WrongLengthIsRepairedOnOutput) {
    auto doc = parse_document(raw_pdf({"<< /Type /Catalog >>", "<< /Length 3 >>\nstream\n0 0 10 10 re\nendstream"}));
    ASSERT_TRUE(doc.objects[1].is_stream());
    EXPECT_EQ(*doc.objects[1].stream_bytes, "0 0 10 10 re");
    const auto audit = audit_structure(serialize_document(doc));
    EXPECT_TRUE(audit.ok) << audit.problem;
}
