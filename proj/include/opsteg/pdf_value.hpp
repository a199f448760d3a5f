#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "opsteg/types.hpp"

namespace opsteg {

struct PdfName {
    std::string value;  // without the leading '/', #xx escapes left as written
    bool operator==(const PdfName&) const = default;
};

struct PdfString {
    std::string bytes;  // decoded bytes
    bool hex = false;   // written as <...> in the source
    bool operator==(const PdfString&) const = default;
};

struct PdfReal {
    double value = 0.0;
    std::string text;  // source spelling, reused on output
    bool operator==(const PdfReal& other) const { return text == other.text; }
};

struct PdfRef {
    ObjectId id;
    bool operator==(const PdfRef&) const = default;
};

struct PdfDictEntry;
class PdfValue;
using PdfArray = std::vector<PdfValue>;
using PdfDict = std::vector<PdfDictEntry>;  // source order preserved

class PdfValue {
public:
    using Storage = std::variant<std::monostate, bool, std::int64_t, PdfReal, PdfName, PdfString,
                                 PdfArray, PdfDict, PdfRef>;

    PdfValue() = default;
    template <typename T>
        requires(!std::is_pointer_v<std::decay_t<T>> && std::is_constructible_v<Storage, T &&>)
    PdfValue(T&& v) : storage_(std::forward<T>(v)) {}

    bool is_null() const noexcept { return std::holds_alternative<std::monostate>(storage_); }

    const std::int64_t* integer() const noexcept { return std::get_if<std::int64_t>(&storage_); }
    const PdfName* name() const noexcept { return std::get_if<PdfName>(&storage_); }
    const PdfString* string() const noexcept { return std::get_if<PdfString>(&storage_); }
    const PdfArray* array() const noexcept { return std::get_if<PdfArray>(&storage_); }
    const PdfDict* dict() const noexcept { return std::get_if<PdfDict>(&storage_); }
    PdfDict* dict() noexcept { return std::get_if<PdfDict>(&storage_); }
    const PdfRef* ref() const noexcept { return std::get_if<PdfRef>(&storage_); }

    bool is_name(std::string_view n) const noexcept {
        const auto* p = name();
        return p != nullptr && p->value == n;
    }

    const Storage& storage() const noexcept { return storage_; }

    bool operator==(const PdfValue&) const;

private:
    Storage storage_;
};

struct PdfDictEntry {
    std::string key;  // without '/'
    PdfValue value;
    bool operator==(const PdfDictEntry&) const = default;
};

const PdfValue* dict_find(const PdfDict& dict, std::string_view key) noexcept;
void dict_set(PdfDict& dict, std::string_view key, PdfValue value);
void dict_erase(PdfDict& dict, std::string_view key);

struct ParsedValue {
    PdfValue value;
    std::size_t end = 0;  // index one past the last byte of the value
};

/// Parses one PDF object starting at `pos` (leading whitespace and comments
/// are skipped). `N G R` sequences become PdfRef. Throws Error(ParseError).
ParsedValue parse_value(std::string_view buf, std::size_t pos);

/// Byte span of the value stored under `key` in the dictionary that starts
/// (after optional whitespace) at `pos`. Only the top level is searched.
std::optional<ByteSpan> find_dict_value_span(std::string_view buf, std::size_t pos,
                                             std::string_view key);

/// Serializes a value in PDF syntax.
std::string write_value(const PdfValue& value);

}  // namespace opsteg
