#include "opsteg/pdf_file.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "opsteg/error.hpp"
#include "opsteg/flate.hpp"
#include "opsteg/pdf_syntax.hpp"

namespace opsteg {

namespace {

using syntax::is_digit;
using syntax::is_regular;
using syntax::is_whitespace;
using syntax::keyword_at;
using syntax::skip_whitespace_and_comments;

constexpr std::string_view kHeader = "%PDF-";

struct ObjectHeader {
    std::size_t start = 0;      // first byte of the object number
    std::size_t after_obj = 0;  // first byte after the `obj` keyword
    ObjectId id;
};

template <typename T>
bool parse_unsigned(std::string_view digits, T& out) {
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
    return ec == std::errc{} && ptr == digits.data() + digits.size();
}

/// Next `N G obj` header at or after `from`, validated backwards from each
/// `obj` keyword occurrence.
std::optional<ObjectHeader> find_object_header(std::string_view buf, std::size_t from) {
    std::size_t p = from;
    while (true) {
        const std::size_t k = buf.find("obj", p);
        if (k == std::string_view::npos) return std::nullopt;
        p = k + 1;
        if (k + 3 < buf.size() && is_regular(buf[k + 3])) continue;

        std::size_t j = k;
        auto back_while = [&](auto pred) {
            const std::size_t stop = j;
            while (j > from && pred(buf[j - 1])) --j;
            return stop - j;
        };
        if (back_while(is_whitespace) == 0) continue;
        const std::size_t gen_end = j;
        if (back_while(is_digit) == 0) continue;
        const std::size_t gen_start = j;
        if (back_while(is_whitespace) == 0) continue;
        const std::size_t num_end = j;
        if (back_while(is_digit) == 0) continue;
        const std::size_t num_start = j;
        if (num_start > 0 && is_regular(buf[num_start - 1])) continue;

        ObjectHeader hdr;
        if (!parse_unsigned(buf.substr(num_start, num_end - num_start), hdr.id.number)) continue;
        if (!parse_unsigned(buf.substr(gen_start, gen_end - gen_start), hdr.id.generation)) continue;
        hdr.start = num_start;
        hdr.after_obj = k + 3;
        return hdr;
    }
}

/// Finds `word` as a standalone keyword at or after `from`.
std::size_t find_keyword(std::string_view buf, std::string_view word, std::size_t from) {
    while (true) {
        const auto k = buf.find(word, from);
        if (k == std::string_view::npos) return k;
        const bool left_ok = k == 0 || !is_regular(buf[k - 1]);
        if (left_ok && keyword_at(buf, k, word)) return k;
        from = k + 1;
    }
}

/// Position of the `endstream` keyword when it follows `pos` after optional
/// whitespace, else npos.
std::size_t endstream_at(std::string_view buf, std::size_t pos) {
    while (pos < buf.size() && is_whitespace(buf[pos])) ++pos;
    return keyword_at(buf, pos, "endstream") ? pos : std::string_view::npos;
}

/// Like find_keyword but without the left boundary check: binary stream data
/// may end in any byte, and writers do not always add an EOL.
std::size_t find_endstream(std::string_view buf, std::size_t from) {
    while (true) {
        const auto k = buf.find("endstream", from);
        if (k == std::string_view::npos || keyword_at(buf, k, "endstream")) return k;
        from = k + 1;
    }
}

class DocumentParser {
public:
    explicit DocumentParser(std::string_view buf) : buf_(buf) {}

    PdfDocument run() {
        if (!buf_.starts_with(kHeader)) {
            throw Error(ErrorCode::MalformedHeader, "input does not begin with %PDF-");
        }
        PdfDocument doc;
        doc.raw_bytes = std::string(buf_);
        const auto version_end = syntax::regular_token_end(buf_, kHeader.size());
        doc.header_version = std::string(buf_.substr(kHeader.size(), version_end - kHeader.size()));

        std::size_t pos = syntax::comment_end(buf_, 0);
        while (true) {
            const auto hdr = find_object_header(buf_, pos);
            scan_gap(pos, hdr ? hdr->start : buf_.size());
            if (!hdr) break;
            auto [obj, end] = parse_object(*hdr);
            objects_.push_back(std::move(obj));
            pos = end;
        }

        // Incremental updates: the definition appearing last in the file wins.
        std::unordered_map<std::uint32_t, std::size_t> latest;
        for (std::size_t i = 0; i < objects_.size(); ++i) latest[objects_[i].id.number] = i;

        std::vector<PdfDict> xref_stream_trailers;
        for (std::size_t i = 0; i < objects_.size(); ++i) {
            auto& obj = objects_[i];
            if (latest[obj.id.number] != i) continue;
            if (const auto* d = obj.dict()) {
                const auto* type = dict_find(*d, "Type");
                if (type != nullptr && type->is_name("ObjStm")) {
                    throw Error(ErrorCode::ObjectStreamsPresent,
                                "object " + to_string(obj.id) +
                                    " is an object stream; expand it first with "
                                    "`qpdf <in> --stream-data=uncompress --object-streams=disable <out>`");
                }
                if (type != nullptr && type->is_name("XRef") && obj.is_stream()) {
                    xref_stream_trailers.push_back(*d);
                    continue;
                }
            }
            doc.objects.push_back(std::move(obj));
        }

        for (auto& d : xref_stream_trailers) trailers_.push_back(std::move(d));
        for (auto it = trailers_.rbegin(); it != trailers_.rend(); ++it) {
            for (const auto& entry : *it) {
                if (dict_find(doc.trailer_dict, entry.key) == nullptr) {
                    doc.trailer_dict.push_back(entry);
                }
            }
        }
        if (dict_find(doc.trailer_dict, "Encrypt") != nullptr) {
            throw Error(ErrorCode::EncryptedDocument, "encrypted documents are not supported");
        }
        if (dict_find(doc.trailer_dict, "Root") == nullptr) {
            for (const auto& obj : doc.objects) {
                const auto* d = obj.dict();
                if (d != nullptr && obj.value.dict() != nullptr) {
                    const auto* type = dict_find(*d, "Type");
                    if (type != nullptr && type->is_name("Catalog")) {
                        dict_set(doc.trailer_dict, "Root", PdfRef{obj.id});
                        break;
                    }
                }
            }
        }

        doc.xref_style = classic_xref_consistent() ? XrefStyle::ClassicTable : XrefStyle::Reconstructed;
        doc.reindex();
        return doc;
    }

private:
    void scan_gap(std::size_t from, std::size_t to) {
        const auto gap = buf_.substr(0, to);
        std::size_t p = from;
        while ((p = find_keyword(gap, "trailer", p)) != std::string_view::npos) {
            try {
                auto parsed = parse_value(gap, p + 7);
                if (const auto* d = parsed.value.dict()) trailers_.push_back(*d);
                p = parsed.end;
            } catch (const Error&) {
                p += 7;
            }
        }
    }

    std::pair<IndirectObject, std::size_t> parse_object(const ObjectHeader& hdr) {
        IndirectObject obj;
        obj.id = hdr.id;
        obj.byte_offset = hdr.start;
        const std::size_t body_start = hdr.after_obj;

        std::optional<std::size_t> value_end;
        try {
            auto parsed = parse_value(buf_, body_start);
            obj.value = std::move(parsed.value);
            value_end = parsed.end;
        } catch (const Error&) {
        }

        if (value_end) {
            const std::size_t p = skip_whitespace_and_comments(buf_, *value_end);
            if (keyword_at(buf_, p, "stream")) {
                obj.body_text = std::string(buf_.substr(body_start, p - body_start));
                std::size_t data_start = p + 6;
                if (data_start < buf_.size() && buf_[data_start] == '\r') ++data_start;
                if (data_start < buf_.size() && buf_[data_start] == '\n') ++data_start;
                const std::size_t data_end = stream_data_end(obj, data_start);
                obj.stream_bytes = std::string(buf_.substr(data_start, data_end - data_start));
                std::size_t q = endstream_at(buf_, data_end);
                if (q == std::string_view::npos) q = find_endstream(buf_, data_end);
                q = skip_whitespace_and_comments(buf_, q + 9);
                if (keyword_at(buf_, q, "endobj")) return {std::move(obj), q + 6};
                return {std::move(obj), expect_endobj(obj, q, false)};
            }
            if (keyword_at(buf_, p, "endobj")) {
                obj.body_text = std::string(buf_.substr(body_start, p - body_start));
                return {std::move(obj), p + 6};
            }
        }
        obj.value = PdfValue{};
        return {std::move(obj), expect_endobj(obj, body_start, true)};
    }

    /// Locates `endobj` for an object whose body could not be parsed cleanly.
    std::size_t expect_endobj(IndirectObject& obj, std::size_t from, bool capture_body) {
        const auto e = find_keyword(buf_, "endobj", from);
        const auto next = find_object_header(buf_, from);
        if (e == std::string_view::npos || (next && next->start < e)) {
            throw Error(ErrorCode::UnbalancedObject,
                        "object " + to_string(obj.id) + " at offset " + std::to_string(obj.byte_offset) +
                            " has no matching endobj");
        }
        if (capture_body) obj.body_text = std::string(buf_.substr(from, e - from));
        return e + 6;
    }

    std::size_t stream_data_end(const IndirectObject& obj, std::size_t data_start) {
        if (const auto* d = obj.dict()) {
            if (const auto* len = dict_find(*d, "Length")) {
                std::optional<std::int64_t> n;
                if (const auto* iv = len->integer()) n = *iv;
                if (const auto* ref = len->ref()) n = indirect_integer(ref->id);
                if (n && *n >= 0 && data_start + static_cast<std::size_t>(*n) <= buf_.size() &&
                    endstream_at(buf_, data_start + static_cast<std::size_t>(*n)) != std::string_view::npos) {
                    return data_start + static_cast<std::size_t>(*n);
                }
            }
        }
        std::size_t e = find_endstream(buf_, data_start);
        if (e == std::string_view::npos) {
            throw Error(ErrorCode::UnbalancedObject,
                        "stream in object " + to_string(obj.id) + " has no endstream");
        }
        if (e > data_start && buf_[e - 1] == '\n') --e;
        if (e > data_start && buf_[e - 1] == '\r') --e;
        return e;
    }

    std::optional<std::int64_t> indirect_integer(ObjectId id) {
        if (!header_index_) {
            header_index_.emplace();
            std::size_t p = 0;
            while (auto hdr = find_object_header(buf_, p)) {
                (*header_index_)[hdr->id] = hdr->after_obj;
                p = hdr->after_obj;
            }
        }
        const auto it = header_index_->find(id);
        if (it == header_index_->end()) return std::nullopt;
        try {
            const auto parsed = parse_value(buf_, it->second);
            if (const auto* iv = parsed.value.integer()) return *iv;
        } catch (const Error&) {
        }
        return std::nullopt;
    }

    bool classic_xref_consistent() const {
        const auto sx = buf_.rfind("startxref");
        if (sx == std::string_view::npos) return false;
        std::size_t p = skip_whitespace_and_comments(buf_, sx + 9);
        const auto e = syntax::regular_token_end(buf_, p);
        std::size_t xref_at = 0;
        if (!parse_unsigned(buf_.substr(p, e - p), xref_at) || xref_at >= buf_.size()) return false;
        if (!keyword_at(buf_, xref_at, "xref")) return false;

        p = xref_at + 4;
        bool any = false;
        while (true) {
            p = skip_whitespace_and_comments(buf_, p);
            if (keyword_at(buf_, p, "trailer") || p >= buf_.size()) return any;
            std::uint32_t first = 0;
            std::uint32_t count = 0;
            auto t = syntax::regular_token_end(buf_, p);
            if (!parse_unsigned(buf_.substr(p, t - p), first)) return false;
            p = skip_whitespace_and_comments(buf_, t);
            t = syntax::regular_token_end(buf_, p);
            if (!parse_unsigned(buf_.substr(p, t - p), count)) return false;
            p = t;
            for (std::uint32_t i = 0; i < count; ++i) {
                p = skip_whitespace_and_comments(buf_, p);
                if (p + 18 > buf_.size()) return false;
                std::size_t offset = 0;
                if (!parse_unsigned(buf_.substr(p, 10), offset)) return false;
                const char kind = buf_[p + 17];
                p += 18;
                if (kind != 'n') continue;
                const auto hdr = find_object_header(buf_, offset);
                if (!hdr || hdr->start != offset || hdr->id.number != first + i) return false;
                any = true;
            }
        }
    }

    std::string_view buf_;
    std::vector<IndirectObject> objects_;
    std::vector<PdfDict> trailers_;
    std::optional<std::map<ObjectId, std::size_t>> header_index_;
};

void ensure_trailing_separator(std::string& out) {
    if (out.empty() || is_regular(out.back())) out.push_back('\n');
}

/// Rewrites the first integer token of a non-stream object body.
void set_integer_body(IndirectObject& obj, std::int64_t value) {
    const auto p = skip_whitespace_and_comments(obj.body_text, 0);
    const auto e = syntax::regular_token_end(obj.body_text, p);
    if (obj.value.integer() != nullptr && e > p) {
        obj.body_text.replace(p, e - p, std::to_string(value));
    } else {
        obj.body_text = " " + std::to_string(value) + "\n";
    }
    obj.value = value;
}

/// Points /Length at `length`, following an indirect reference when the
/// stream stores its length in a separate integer object.
void write_length(PdfDocument& doc, IndirectObject& obj, std::int64_t length) {
    const auto* current = obj.dict() != nullptr ? dict_find(*obj.dict(), "Length") : nullptr;
    if (current != nullptr && current->ref() != nullptr) {
        IndirectObject* target = doc.find(current->ref()->id);
        if (target != nullptr && !target->is_stream()) {
            set_integer_body(*target, length);
            return;
        }
    }
    const auto span = find_dict_value_span(obj.body_text, 0, "Length");
    if (span) {
        obj.body_text.replace(span->begin, span->size(), std::to_string(length));
    } else {
        const auto open = obj.body_text.find("<<");
        obj.body_text.insert(open == std::string::npos ? 0 : open + 2, " /Length " + std::to_string(length));
    }
    if (auto* d = obj.value.dict()) dict_set(*d, "Length", length);
}

std::optional<std::int64_t> decode_parms_predictor(const PdfDocument* doc, const PdfValue& parms) {
    const PdfValue* v = &parms;
    if (doc != nullptr) v = &doc->resolve(*v);
    if (const auto* arr = v->array()) {
        if (arr->empty()) return std::nullopt;
        v = &(*arr)[0];
        if (doc != nullptr) v = &doc->resolve(*v);
    }
    if (const auto* d = v->dict()) {
        if (const auto* pred = dict_find(*d, "Predictor")) {
            if (const auto* iv = pred->integer()) return *iv;
        }
    }
    return std::nullopt;
}

std::vector<std::string> filter_chain_impl(const PdfDocument* doc, const IndirectObject& obj) {
    std::vector<std::string> chain;
    const auto* d = obj.dict();
    if (d == nullptr) return chain;
    const auto* filter = dict_find(*d, "Filter");
    if (filter == nullptr) return chain;
    const PdfValue* f = doc != nullptr ? &doc->resolve(*filter) : filter;
    if (const auto* n = f->name()) {
        chain.push_back(n->value);
    } else if (const auto* arr = f->array()) {
        for (const auto& item : *arr) {
            const PdfValue& r = doc != nullptr ? doc->resolve(item) : item;
            if (const auto* n2 = r.name()) {
                chain.push_back(n2->value);
            } else {
                chain.push_back("?");
            }
        }
    } else if (!f->is_null()) {
        chain.push_back("?");
    }
    return chain;
}

std::string decode_impl(const PdfDocument* doc, const IndirectObject& obj) {
    if (!obj.stream_bytes) {
        throw Error(ErrorCode::InvalidArgument, "object " + to_string(obj.id) + " is not a stream");
    }
    const auto chain = filter_chain_impl(doc, obj);
    if (chain.empty()) return *obj.stream_bytes;
    if (chain.size() != 1 || chain[0] != "FlateDecode") {
        std::string names;
        for (const auto& c : chain) names += "/" + c + " ";
        throw Error(ErrorCode::UnsupportedFilter, "filter chain " + names + "is not supported");
    }
    if (const auto* parms = dict_find(*obj.dict(), "DecodeParms")) {
        const auto predictor = decode_parms_predictor(doc, *parms);
        if (predictor && *predictor > 1) {
            throw Error(ErrorCode::UnsupportedFilter, "/FlateDecode with /Predictor " +
                                                          std::to_string(*predictor) + " is not supported");
        }
    }
    return flate::inflate(*obj.stream_bytes);
}

}  // namespace

std::string_view to_string(StreamRole role) noexcept {
    switch (role) {
        case StreamRole::PageContents: return "page-contents";
        case StreamRole::FormXObject: return "form-xobject";
        case StreamRole::Type3CharProc: return "type3-charproc";
    }
    return "unknown";
}

const IndirectObject* PdfDocument::find(ObjectId id) const noexcept {
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &objects[it->second];
}

IndirectObject* PdfDocument::find(ObjectId id) noexcept {
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &objects[it->second];
}

const PdfValue& PdfDocument::resolve(const PdfValue& value) const noexcept {
    if (const auto* ref = value.ref()) {
        if (const auto* obj = find(ref->id)) return obj->value;
        static const PdfValue null_value;
        return null_value;
    }
    return value;
}

void PdfDocument::reindex() {
    index_.clear();
    for (std::size_t i = 0; i < objects.size(); ++i) index_[objects[i].id] = i;
}

void PdfDocument::replace_stream(ObjectId owner, std::string_view new_decoded) {
    IndirectObject* obj = find(owner);
    if (obj == nullptr || !obj->is_stream()) {
        throw Error(ErrorCode::UnknownObject, "no stream object " + to_string(owner));
    }
    obj->stream_bytes = encode_stream(new_decoded, filter_chain(*this, *obj));
    write_length(*this, *obj, static_cast<std::int64_t>(obj->stream_bytes->size()));
}

PdfDocument parse_document(std::string_view bytes) {
    PdfDocument doc = DocumentParser(bytes).run();
    // Normalize any /Length that disagrees with the recovered payload.
    for (auto& obj : doc.objects) {
        if (!obj.is_stream() || obj.dict() == nullptr) continue;
        const auto actual = static_cast<std::int64_t>(obj.stream_bytes->size());
        const auto* len = dict_find(*obj.dict(), "Length");
        const auto* declared = len != nullptr ? doc.resolve(*len).integer() : nullptr;
        if (declared == nullptr || *declared != actual) write_length(doc, obj, actual);
    }
    return doc;
}

std::vector<std::string> filter_chain(const PdfDocument& doc, const IndirectObject& obj) {
    return filter_chain_impl(&doc, obj);
}

std::string decode_stream(const PdfDocument& doc, const IndirectObject& obj) { return decode_impl(&doc, obj); }

std::string decode_stream(const IndirectObject& obj) { return decode_impl(nullptr, obj); }

std::string encode_stream(std::string_view plaintext, const std::vector<std::string>& chain) {
    if (chain.empty()) return std::string(plaintext);
    if (chain.size() == 1 && chain[0] == "FlateDecode") return flate::deflate(plaintext);
    std::string names;
    for (const auto& c : chain) names += "/" + c + " ";
    throw Error(ErrorCode::UnsupportedFilter, "cannot encode with filter chain " + names);
}

PdfDocument replace_stream(PdfDocument doc, ObjectId owner, std::string_view new_decoded) {
    doc.replace_stream(owner, new_decoded);
    return doc;
}

ContentStreams collect_content_streams(const PdfDocument& doc) {
    std::map<ObjectId, StreamRole> roles;
    auto add = [&roles](const PdfValue& v, StreamRole role) {
        if (const auto* r = v.ref()) roles.emplace(r->id, role);
    };

    for (const auto& obj : doc.objects) {
        const auto* d = obj.dict();
        if (d == nullptr) continue;
        const auto* type = dict_find(*d, "Type");
        const auto* subtype = dict_find(*d, "Subtype");
        if (type != nullptr && type->is_name("Page")) {
            if (const auto* contents = dict_find(*d, "Contents")) {
                const PdfValue& resolved = doc.resolve(*contents);
                if (const auto* arr = resolved.array()) {
                    for (const auto& item : *arr) add(item, StreamRole::PageContents);
                } else {
                    add(*contents, StreamRole::PageContents);
                }
            }
        }
        if (obj.is_stream() && subtype != nullptr && subtype->is_name("Form")) {
            roles.emplace(obj.id, StreamRole::FormXObject);
        }
        if (subtype != nullptr && subtype->is_name("Type3")) {
            if (const auto* procs = dict_find(*d, "CharProcs")) {
                if (const auto* pd = doc.resolve(*procs).dict()) {
                    for (const auto& entry : *pd) add(entry.value, StreamRole::Type3CharProc);
                }
            }
        }
    }

    ContentStreams result;
    for (const auto& obj : doc.objects) {
        const auto it = roles.find(obj.id);
        if (it == roles.end()) {
            if (obj.is_stream()) {
                std::string what = "not a content stream";
                if (const auto* d = obj.dict()) {
                    if (const auto* st = dict_find(*d, "Subtype"); st != nullptr && st->name() != nullptr) {
                        what += " (/Subtype /" + st->name()->value + ")";
                    }
                }
                result.skipped.push_back({obj.id, what});
            }
            continue;
        }
        if (!obj.is_stream()) {
            result.skipped.push_back({obj.id, "referenced as content but is not a stream"});
            continue;
        }
        try {
            ContentStreamRef ref;
            ref.owner = obj.id;
            ref.filter_chain = filter_chain(doc, obj);
            ref.decoded_bytes = decode_stream(doc, obj);
            ref.role = it->second;
            result.streams.push_back(std::move(ref));
        } catch (const Error& e) {
            result.skipped.push_back({obj.id, e.what()});
        }
    }
    return result;
}

std::string serialize_document(const PdfDocument& doc) {
    std::size_t estimate = 1024;
    for (const auto& obj : doc.objects) {
        estimate += obj.body_text.size() + 64 + (obj.stream_bytes ? obj.stream_bytes->size() : 0);
    }
    std::string out;
    out.reserve(estimate);
    out += kHeader;
    out += doc.header_version.empty() ? "1.7" : doc.header_version;
    out += "\n%\xE2\xE3\xCF\xD3\n";

    std::uint32_t max_number = 0;
    for (const auto& obj : doc.objects) max_number = std::max(max_number, obj.id.number);
    std::vector<std::optional<std::pair<std::size_t, std::uint16_t>>> entries(max_number + 1);

    for (const auto& obj : doc.objects) {
        entries[obj.id.number] = std::pair{out.size(), obj.id.generation};
        out += std::to_string(obj.id.number);
        out.push_back(' ');
        out += std::to_string(obj.id.generation);
        out += " obj";
        out += obj.body_text;
        ensure_trailing_separator(out);
        if (obj.stream_bytes) {
            out += "stream\n";
            out += *obj.stream_bytes;
            out += "\nendstream\n";
        }
        out += "endobj\n";
    }

    const std::size_t xref_offset = out.size();
    out += "xref\n0 " + std::to_string(entries.size()) + "\n";
    char line[32];
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i == 0 || !entries[i]) {
            out += "0000000000 65535 f \n";
            continue;
        }
        std::snprintf(line, sizeof line, "%010zu %05u n \n", entries[i]->first,
                      static_cast<unsigned>(entries[i]->second));
        out += line;
    }

    PdfDict trailer = doc.trailer_dict;
    for (const auto* key : {"Prev", "XRefStm", "Type", "W", "Index", "Length", "Filter", "DecodeParms"}) {
        dict_erase(trailer, key);
    }
    dict_set(trailer, "Size", static_cast<std::int64_t>(entries.size()));
    out += "trailer\n";
    out += write_value(trailer);
    out += "\nstartxref\n";
    out += std::to_string(xref_offset);
    out += "\n%%EOF\n";
    return out;
}

}  // namespace opsteg
