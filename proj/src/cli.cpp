#include "opsteg/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "opsteg/error.hpp"
#include "opsteg/fixture.hpp"
#include "opsteg/pdf_file.hpp"
#include "opsteg/steg_codec.hpp"

namespace opsteg::cli {

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::InvalidArgument, "short write to '" + path + "'");
}

bool same_file(const std::string& a, const std::string& b) {
    std::error_code ec;
    if (fs::exists(a, ec) && fs::exists(b, ec)) return fs::equivalent(a, b, ec);
    return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

struct Options {
    std::string config_path;
    std::optional<bool> include_low_reliability;
    bool quiet = false;
};

StegConfig resolve_config(const Options& opt) {
    std::string path = opt.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("OPSTEG_CONFIG"); env != nullptr) path = env;
    }
    StegConfig cfg = path.empty() ? StegConfig{} : load_config(read_file(path));
    if (opt.include_low_reliability) cfg.include_low_reliability = *opt.include_low_reliability;
    return cfg;
}

std::string document_tag(const PdfDocument& doc) {
    const auto* v = dict_find(doc.trailer_dict, kVersionTagKey);
    if (v == nullptr) return {};
    const auto* s = v->string();
    return s != nullptr ? s->bytes : std::string{};
}

void print_capacity(const CapacityReport& cap, const DocumentScan& scan, const Options& opt, std::ostream& out) {
    out << fmt::format("content streams: {} (skipped {})\n", scan.streams.size(), scan.skipped.size());
    if (!cap.per_operator.empty()) {
        out << fmt::format("  {:<6}{:>10}{:>10}\n", "op", "slots", "bits");
        for (const auto& [op, c] : cap.per_operator) out << fmt::format("  {:<6}{:>10}{:>10}\n", op, c.slots, c.bits);
    }
    out << fmt::format("eligible operands: {}\n", cap.eligible_operands);
    out << fmt::format("capacity: {} bits\n", cap.bits);
    out << fmt::format("capacity: {} bytes\n", cap.bytes);
    if (opt.quiet) return;
    out << fmt::format("streams={}\nskipped_streams={}\nscan_diagnostics={}\n", scan.streams.size(),
                       scan.skipped.size(), scan.diagnostics.size());
    out << fmt::format("eligible_operands={}\ncapacity_bits={}\ncapacity_bytes={}\n", cap.eligible_operands,
                       cap.bits, cap.bytes);
    for (const auto& [op, c] : cap.per_operator) {
        out << fmt::format("op.{}.slots={}\nop.{}.bits={}\n", op, c.slots, op, c.bits);
    }
}

int cmd_stat(const std::string& cover, const Options& opt, std::ostream& out) {
    const auto cfg = resolve_config(opt);
    const auto doc = parse_document(read_file(cover));
    const Registry registry(cfg);
    const auto scan = scan_document(doc, registry);
    print_capacity(capacity(scan, registry), scan, opt, out);
    return kOk;
}

int cmd_embed(const std::string& cover, const std::string& output, const std::string& payload_path,
              const Options& opt, std::ostream& out) {
    if (same_file(cover, output)) throw Error(ErrorCode::InvalidArgument, "output would overwrite the cover");
    const auto cfg = resolve_config(opt);
    const auto payload = read_file(payload_path);
    auto doc = parse_document(read_file(cover));
    const auto cap = capacity(doc, cfg);
    out << fmt::format("capacity: {} bytes\n", cap.bytes);
    out << fmt::format("payload: {} bytes\n", payload.size());

    auto result = embed_document(std::move(doc), payload, cfg);
    if (!cfg.version_tag.empty()) {
        dict_set(result.document.trailer_dict, kVersionTagKey, PdfString{cfg.version_tag, true});
    }
    const auto bytes = serialize_document(result.document);
    write_file(output, bytes);

    const auto& r = result.report;
    out << fmt::format("operands visited: {}\noperands modified: {}\noperands exact match: {}\n",
                       r.operands_visited, r.operands_modified, r.operands_exact_match);
    out << fmt::format("digits added: {}\nbits embedded: {}\noutput: {} ({} bytes)\n", r.digits_added,
                       r.bits_embedded, output, bytes.size());
    if (!opt.quiet) {
        out << fmt::format("capacity_bytes={}\npayload_bytes={}\noperands_visited={}\noperands_modified={}\n",
                           cap.bytes, payload.size(), r.operands_visited, r.operands_modified);
        out << fmt::format("operands_exact_match={}\ndigits_added={}\nbits_embedded={}\noutput_bytes={}\n",
                           r.operands_exact_match, r.digits_added, r.bits_embedded, bytes.size());
    }
    return kOk;
}

int cmd_extract(const std::string& stego, const std::string& output, const Options& opt, std::ostream& out,
                std::ostream& err) {
    if (same_file(stego, output)) throw Error(ErrorCode::InvalidArgument, "output would overwrite the input");
    const auto cfg = resolve_config(opt);
    const auto doc = parse_document(read_file(stego));
    if (const auto tag = document_tag(doc); tag != cfg.version_tag) {
        err << fmt::format("error: document was embedded with version tag '{}' but the config says '{}'\n", tag,
                           cfg.version_tag);
        return kVersionMismatch;
    }
    const auto payload = extract_document(doc, cfg);
    write_file(output, payload);
    out << fmt::format("extracted: {} bytes\n", payload.size());
    if (!opt.quiet) out << fmt::format("payload_bytes={}\n", payload.size());
    return kOk;
}

int cmd_gen_fixture(const std::string& spec_path, const std::string& output, const Options& opt,
                    std::ostream& out) {
    const auto spec = parse_fixture_spec(read_file(spec_path));
    const auto cfg = resolve_config(opt);
    const auto bytes = build_fixture(spec);
    write_file(output, bytes);
    const auto c = census(spec, cfg);
    out << fmt::format("pages: {}\neligible slots: {}\n", spec.page_count(), c.total());
    if (!opt.quiet) {
        out << fmt::format("pages={}\neligible_slots={}\n", spec.page_count(), c.total());
        for (const auto& [op, n] : c.eligible_slots) out << fmt::format("op.{}.slots={}\n", op, n);
    }
    return kOk;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InsufficientCapacity: return kInsufficientCapacity;
        case ErrorCode::TruncatedMessage:
        case ErrorCode::ImplausibleLength: return kNoMessage;
        default: return kInputError;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hide a payload in the numeric operands of PDF content streams", "opsteg"};
    app.require_subcommand(1);
    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "Config file (default: $OPSTEG_CONFIG)");
        sub->add_option("--include-low-reliability", opt.include_low_reliability,
                        "Override whether Tc/Tw operands carry bits (true|false)");
        sub->add_flag("-q,--quiet", opt.quiet, "Omit the key=value listing");
    };

    std::string cover;
    std::string output;
    std::string payload;

    auto* stat = app.add_subcommand("stat", "Report the capacity of a cover PDF");
    stat->add_option("cover", cover, "Cover PDF")->required();
    add_common(stat);

    auto* embed = app.add_subcommand("embed", "Hide a payload file in a cover PDF");
    embed->add_option("cover", cover, "Cover PDF")->required();
    embed->add_option("output", output, "Stego PDF to write")->required();
    embed->add_option("payload", payload, "Payload file")->required();
    add_common(embed);

    auto* extract = app.add_subcommand("extract", "Recover the payload from a stego PDF");
    extract->add_option("stego", cover, "Stego PDF")->required();
    extract->add_option("output", output, "Payload file to write")->required();
    add_common(extract);

    auto* gen = app.add_subcommand("gen-fixture", "Build a test PDF from a fixture description");
    gen->add_option("spec", cover, "Fixture description file")->required();
    gen->add_option("output", output, "PDF to write")->required();
    add_common(gen);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }

    try {
        if (stat->parsed()) return cmd_stat(cover, opt, out);
        if (embed->parsed()) return cmd_embed(cover, output, payload, opt, out);
        if (extract->parsed()) return cmd_extract(cover, output, opt, out, err);
        return cmd_gen_fixture(cover, output, opt, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
}

}  // namespace opsteg::cli
