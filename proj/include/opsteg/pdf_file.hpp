#pragma once

// Byte-exact PDF object model: linear-scan parsing, content stream discovery,
// flate filter handling, stream replacement and classic-xref serialization.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opsteg/pdf_value.hpp"
#include "opsteg/types.hpp"

namespace opsteg {

enum class XrefStyle { ClassicTable, Reconstructed };

enum class StreamRole { PageContents, FormXObject, Type3CharProc };

std::string_view to_string(StreamRole role) noexcept;

struct IndirectObject {
    ObjectId id;
    PdfValue value;             // parsed object (the stream dictionary for streams)
    std::string body_text;      // raw bytes after `obj` up to `stream` / `endobj`
    std::optional<std::string> stream_bytes;  // encoded stream payload
    std::size_t byte_offset = 0;              // offset of the object number token

    const PdfDict* dict() const noexcept { return value.dict(); }
    bool is_stream() const noexcept { return stream_bytes.has_value(); }
};

struct ContentStreamRef {
    ObjectId owner;
    std::string decoded_bytes;
    std::vector<std::string> filter_chain;  // names without '/'
    StreamRole role = StreamRole::PageContents;
};

struct StreamDiagnostic {
    ObjectId owner;
    std::string reason;
};

struct ContentStreams {
    std::vector<ContentStreamRef> streams;  // ascending owner byte offset
    std::vector<StreamDiagnostic> skipped;
};

class PdfDocument {
public:
    std::string raw_bytes;
    std::vector<IndirectObject> objects;  // ascending byte_offset
    PdfDict trailer_dict;
    std::string header_version;
    XrefStyle xref_style = XrefStyle::Reconstructed;

    const IndirectObject* find(ObjectId id) const noexcept;
    IndirectObject* find(ObjectId id) noexcept;

    /// Follows a reference (one level); other values are returned unchanged.
    const PdfValue& resolve(const PdfValue& value) const noexcept;

    /// Re-encodes `new_decoded` with the stream's own filter chain and updates
    /// /Length (or the integer object it references). Throws UnknownObject.
    void replace_stream(ObjectId owner, std::string_view new_decoded);

    /// Rebuilds the id lookup table; call after editing `objects` directly.
    void reindex();

private:
    std::map<ObjectId, std::size_t> index_;
};

PdfDocument parse_document(std::string_view bytes);

ContentStreams collect_content_streams(const PdfDocument& doc);

std::vector<std::string> filter_chain(const PdfDocument& doc, const IndirectObject& obj);

std::string decode_stream(const PdfDocument& doc, const IndirectObject& obj);
std::string decode_stream(const IndirectObject& obj);

std::string encode_stream(std::string_view plaintext, const std::vector<std::string>& filter_chain);

PdfDocument replace_stream(PdfDocument doc, ObjectId owner, std::string_view new_decoded);

std::string serialize_document(const PdfDocument& doc);

}  // namespace opsteg
