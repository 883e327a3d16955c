// mrpods: encode files to printable page images and back, inspect sheets,
// degrade images through the simulated channel, run sweeps and cost
// analyses.
//
// Exit codes:
//   0  success
//   1  unexpected internal error
//   2  invalid flags or configuration
//   3  file I/O error
//   4  input larger than the configured limit
//   5  partial recovery
//   6  nothing recovered / grid not found

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>

#include "mrpods/channel.hpp"
#include "mrpods/cost.hpp"
#include "mrpods/error.hpp"
#include "mrpods/image_io.hpp"
#include "mrpods/parallel.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mrpods;

namespace {

enum Exit : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kIo = 3,
  kTooLarge = 4,
  kPartial = 5,
  kNothing = 6,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::RatioUnrealizable:
    case ErrorCode::DpiTooLow:
    case ErrorCode::YearOutOfRange:
      return kConfig;
    case ErrorCode::Io:
      return kIo;
    case ErrorCode::InputTooLarge:
      return kTooLarge;
    case ErrorCode::GridNotFound:
    case ErrorCode::ExcessiveSkew:
      return kNothing;
    default:
      return kInternal;
  }
}

Bytes read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw UsageError("bad number for " + what + ": '" + text + "'");
}

int parse_int(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(text, &used);
    if (used == text.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw UsageError("bad integer for " + what + ": '" + text + "'");
}

// Sheet flags shared by encode, capacity, cost fig2 and simulate.
struct SheetFlags {
  std::string dpi = "200";
  std::string dot_size = "70";
  std::string redundancy = "1:5";
  std::string page = "8.5x11";
  double margin = 0.0;
  bool omit_total_pages = false;
  int render_dpi = 600;

  void add_to(CLI::App* app, bool lists) {
    const std::string many = lists ? " (comma-separated list)" : "";
    app->add_option("--dpi", dpi, "Data dots per inch" + many)->capture_default_str();
    app->add_option("--dot-size", dot_size, "Dot size, percent of cell area" + many)->capture_default_str();
    app->add_option("--redundancy", redundancy, "Parity to data ratio P:D" + many)->capture_default_str();
    app->add_option("--page", page, "Page size WxH in inches")->capture_default_str();
    app->add_option("--margin", margin, "Margin in inches")->capture_default_str();
    app->add_flag("--omit-total-pages", omit_total_pages, "Withhold the page count from headers");
    app->add_option("--render-dpi", render_dpi, "Raster resolution in pixels per inch")->capture_default_str();
  }

  void apply_page(SheetConfig& c) const {
    const auto parts = split(page, 'x');
    if (parts.size() != 2) throw UsageError("--page expects WxH, got '" + page + "'");
    c.page_width_in = parse_double(parts[0], "--page width");
    c.page_height_in = parse_double(parts[1], "--page height");
    c.margin_in = margin;
    c.omit_total_pages = omit_total_pages;
  }

  SheetConfig single() const {
    SheetConfig c;
    c.dots_per_inch = parse_int(dpi, "--dpi");
    c.dot_size_percent = parse_int(dot_size, "--dot-size");
    c.redundancy = RedundancyRatio::parse(redundancy);
    apply_page(c);
    validate(c);
    if (render_dpi < c.dots_per_inch) {
      throw Error(ErrorCode::DpiTooLow, "--render-dpi must be at least --dpi");
    }
    return c;
  }

  std::vector<SweepConfig> grid() const {
    std::vector<SweepConfig> out;
    for (const auto& d : split(dpi, ',')) {
      for (const auto& s : split(dot_size, ',')) {
        for (const auto& r : split(redundancy, ',')) {
          SweepConfig sc;
          sc.sheet.dots_per_inch = parse_int(d, "--dpi");
          sc.sheet.dot_size_percent = parse_int(s, "--dot-size");
          sc.sheet.redundancy = RedundancyRatio::parse(r);
          apply_page(sc.sheet);
          validate(sc.sheet);
          sc.render_dpi = render_dpi;
          if (render_dpi < sc.sheet.dots_per_inch) throw Error(ErrorCode::DpiTooLow, "--render-dpi below --dpi");
          out.push_back(sc);
        }
      }
    }
    if (out.empty()) throw UsageError("empty configuration grid");
    return out;
  }
};

json config_json(const SheetConfig& c, int render_dpi) {
  return json{{"dots_per_inch", c.dots_per_inch},
              {"dot_size_percent", c.dot_size_percent},
              {"redundancy", c.redundancy.to_string()},
              {"page_width_in", c.page_width_in},
              {"page_height_in", c.page_height_in},
              {"margin_in", c.margin_in},
              {"omit_total_pages", c.omit_total_pages},
              {"render_dpi", render_dpi}};
}

// ---------------------------------------------------------------- encode

struct EncodeArgs {
  std::string input;
  std::string out = ".";
  bool allow_large = false;
  std::string format = "png";
  SheetFlags sheet;
};

int cmd_encode(const EncodeArgs& a) {
  const SheetConfig config = a.sheet.single();
  ImageFormat format = ImageFormat::Png;
  if (a.format == "pgm") format = ImageFormat::Pgm;
  else if (a.format == "pbm") format = ImageFormat::Pbm;
  else if (a.format != "png") throw UsageError("--format must be png, pgm or pbm");

  const Bytes raw = read_file(a.input);
  if (raw.empty()) throw Error(ErrorCode::ConfigInvalid, "nothing to encode: " + a.input + " is empty");
  CompressOptions options;
  options.allow_large = a.allow_large;
  auto [compressed, stats] = compress(ByteStream{raw, Stage::Raw}, options);
  const std::vector<Page> pages = paginate(compressed, config);

  fs::create_directories(a.out);
  const std::string stem = fs::path(a.input).stem().string();
  std::vector<Bytes> images(pages.size());
  parallel_for(pages.size(), [&](std::size_t i) {
    const RasterImage img = render(pages[i], config, a.sheet.render_dpi);
    images[i] = format == ImageFormat::Png ? encode_png(img) : encode_pnm(img, format);
  });

  json manifest;
  manifest["payload_id"] = to_hex(pages.front().header.payload_id);
  manifest["source"] = {{"name", fs::path(a.input).filename().string()},
                        {"bytes", raw.size()},
                        {"sha256", sha256_hex(raw)}};
  manifest["compressed_bytes"] = compressed.bytes.size();
  manifest["compression_ratio"] = stats.compression_ratio;
  manifest["page_count"] = pages.size();
  manifest["config"] = config_json(config, a.sheet.render_dpi);
  json page_list = json::array();
  for (std::size_t i = 0; i < pages.size(); ++i) {
    std::string name = page_image_name(stem, static_cast<std::uint32_t>(i));
    if (format != ImageFormat::Png) name = name.substr(0, name.size() - 3) + a.format;
    write_file(fs::path(a.out) / name, images[i]);
    page_list.push_back({{"page_index", i}, {"file", name}, {"sha256", sha256_hex(images[i])}});
  }
  manifest["pages"] = page_list;
  const std::string text = manifest.dump(2) + "\n";
  write_file(fs::path(a.out) / "manifest.json", std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  std::cout << "encoded " << raw.size() << " bytes (" << compressed.bytes.size() << " compressed) into "
            << pages.size() << " page" << (pages.size() == 1 ? "" : "s") << " in " << a.out << "\n";
  return kOk;
}

// ---------------------------------------------------------------- decode

struct DecodeArgs {
  std::vector<std::string> images;
  std::string out;
  std::string report;
  bool json_output = false;
};

const char* source_name(HeaderSource s) {
  switch (s) {
    case HeaderSource::Both: return "both";
    case HeaderSource::TopOnly: return "top";
    case HeaderSource::BottomOnly: return "bottom";
  }
  return "?";
}

int cmd_decode(const DecodeArgs& a) {
  // Identical files decode once.
  std::vector<std::string> files;
  std::map<std::string, std::string> seen;
  json duplicates = json::array();
  std::vector<Bytes> contents;
  for (const auto& f : a.images) {
    Bytes bytes = read_file(f);
    const std::string digest = sha256_hex(bytes);
    if (const auto it = seen.find(digest); it != seen.end()) {
      duplicates.push_back({{"file", f}, {"same_as", it->second}});
      continue;
    }
    seen.emplace(digest, f);
    files.push_back(f);
    contents.push_back(std::move(bytes));
  }

  struct Outcome {
    std::optional<SheetDecode> decode;
    std::string error;
  };
  std::vector<Outcome> outcomes(files.size());
  parallel_for(files.size(), [&](std::size_t i) {
    try {
      const RasterImage img = contents[i].size() >= 4 && contents[i][0] == 0x89 ? decode_png(contents[i])
                                                                               : decode_pnm(contents[i]);
      outcomes[i].decode = decode_sheet(img);
    } catch (const Error& e) {
      outcomes[i].error = e.what();
    }
    contents[i].clear();
  });

  json report;
  json sheets = json::array();
  std::vector<Page> pages;
  for (std::size_t i = 0; i < files.size(); ++i) {
    json s{{"file", files[i]}};
    if (outcomes[i].decode) {
      const SheetDecode& d = *outcomes[i].decode;
      const PageHeader& h = d.page.header;
      s["page_index"] = h.page_index;
      s["header_source"] = source_name(d.report.header_source);
      s["corrected_symbols"] = d.report.corrected_symbols;
      s["erased_symbols"] = d.report.erased_symbols;
      s["erased_cells"] = d.report.erased_cells;
      s["raw_crc_failures"] = d.report.raw_crc_failures;
      s["failed_codewords"] = d.report.failed_codewords;
      s["failed_blocks"] = d.report.failed_blocks;
      pages.push_back(d.page);
    } else {
      s["error"] = outcomes[i].error;
    }
    sheets.push_back(s);
  }
  report["sheets"] = sheets;
  report["duplicates"] = duplicates;

  int code = kNothing;
  std::string status = "nothing recovered";
  if (!pages.empty()) {
    AssembleResult assembled;
    try {
      assembled = assemble(pages);
    } catch (const Error& e) {
      report["assemble_error"] = e.what();
      assembled = MissingReport{{}, {}, false, e.what()};
    }
    if (auto* stream = std::get_if<ByteStream>(&assembled)) {
      const ByteStream raw = decompress(*stream);
      write_file(a.out, raw.bytes);
      report["output_bytes"] = raw.bytes.size();
      report["sha256"] = sha256_hex(raw.bytes);
      code = kOk;
      status = "complete";
    } else {
      const MissingReport& m = std::get<MissingReport>(assembled);
      report["missing_pages"] = m.missing_pages;
      report["damaged_pages"] = m.damaged_pages;
      report["total_unknown"] = m.total_unknown;
      report["reason"] = m.reason;
      const PartialAssembly partial = partial_assemble(pages);
      // Only blocks lying wholly before the first gap are trustworthy.
      std::span<const std::uint8_t> intact(partial.data);
      if (!partial.gaps.empty()) intact = intact.first(static_cast<std::size_t>(partial.gaps.front().first));
      const PartialDecode prefix = decompress_prefix(intact);
      write_file(a.out, prefix.data);
      json gaps = json::array();
      for (const auto& [b, e] : partial.gaps) gaps.push_back({{"begin", b}, {"end", e}});
      report["recovered_pages"] = partial.recovered_pages;
      report["compressed_gaps"] = gaps;
      report["recovered_prefix_bytes"] = prefix.data.size();
      report["recovered_blocks"] = prefix.blocks_decoded;
      report["total_blocks"] = prefix.blocks_total;
      code = kPartial;
      status = "partial";
    }
  }
  report["status"] = status;
  report["exit_code"] = code;

  if (!a.report.empty()) write_text(a.report, report.dump(2) + "\n");
  if (a.json_output) {
    std::cout << report.dump(2) << "\n";
  } else {
    for (const auto& s : sheets) {
      std::cout << s["file"].get<std::string>() << ": ";
      if (s.contains("error")) {
        std::cout << "unreadable (" << s["error"].get<std::string>() << ")\n";
      } else {
        std::cout << "page " << s["page_index"] << ", " << s["corrected_symbols"] << " corrected, "
                  << s["erased_symbols"] << " erased, " << s["failed_codewords"] << " failed codewords\n";
      }
    }
    for (const auto& d : duplicates) std::cout << d["file"].get<std::string>() << ": duplicate, skipped\n";
    if (report.contains("missing_pages")) {
      std::cout << "missing pages:";
      for (auto p : report["missing_pages"]) std::cout << " " << p;
      std::cout << "\ndamaged pages:";
      for (auto p : report["damaged_pages"]) std::cout << " " << p;
      std::cout << "\nreason: " << report["reason"].get<std::string>() << "\n";
    }
    std::cout << "status: " << status << "\n";
  }
  return code;
}

// ---------------------------------------------------------------- inspect

int cmd_inspect(const std::string& path) {
  const RasterImage img = read_image(path);
  const GridGeometry g = locate_grid(img);
  std::cout << "image: " << img.width << " x " << img.height << " px\n"
            << "grid: " << g.cols << " x " << g.rows << " cells\n"
            << "cell pitch: " << g.cell_pitch_px << " px\n"
            << "rotation: " << g.rotation_deg << " deg\n";
  const char* names[] = {"top-left", "top-right", "bottom-left", "bottom-right"};
  for (int i = 0; i < 4; ++i) {
    std::cout << "corner " << names[i] << ": (" << g.corners[i].x << ", " << g.corners[i].y << ")\n";
  }
  const CellSample cells = sample_cells(img, g);
  std::cout << "threshold: " << cells.threshold << (cells.used_local_threshold ? " (local)" : " (global)") << "\n"
            << "erased cells: " << cells.erasure_count() << "\n";
  const SheetDecode d = decode_cells(cells, g);
  const PageHeader& h = d.page.header;
  std::cout << "header copies valid: " << d.report.header_copies_valid << " of " << d.report.header_copies_total
            << " (source: " << source_name(d.report.header_source) << ")\n"
            << "format version: " << int(h.format_version) << "\n"
            << "payload id: " << to_hex(h.payload_id) << "\n"
            << "page index: " << h.page_index << "\n";
  if (h.total_withheld) {
    std::cout << "total pages: withheld\n"
              << "payload bytes: withheld\n";
  } else {
    std::cout << "total pages: " << h.total_pages << "\n"
              << "payload bytes: " << h.payload_total_bytes << "\n";
  }
  std::cout << "reed-solomon: n=" << int(h.rs_n) << " k=" << int(h.rs_k) << "\n"
            << "dots per inch: " << h.dots_per_inch << "\n"
            << "blocks: " << d.report.blocks_total << ", raw CRC failures: " << d.report.raw_crc_failures << "\n"
            << "corrected symbols: " << d.report.corrected_symbols << ", failed codewords: "
            << d.report.failed_codewords << "\n";
  if (!d.report.failed_blocks.empty()) {
    std::cout << "unrecoverable blocks:";
    for (auto b : d.report.failed_blocks) std::cout << " " << b;
    std::cout << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::vector<std::string> images;
  std::vector<std::string> profiles;
  SheetFlags sheet;
  int seeds = 10;
  std::uint64_t seed = 1;
  int rescan = 0;
  bool hostile = false;
  std::string out;
  std::string summary;
};

// A manifest stands for the page images it lists.
std::vector<std::string> expand_manifests(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& path : inputs) {
    if (fs::path(path).extension() != ".json") {
      out.push_back(path);
      continue;
    }
    const Bytes bytes = read_file(path);
    json manifest;
    try {
      manifest = json::parse(bytes.begin(), bytes.end());
      for (const auto& page : manifest.at("pages")) {
        out.push_back((fs::path(path).parent_path() / page.at("file").get<std::string>()).string());
      }
    } catch (const json::exception& e) {
      throw UsageError("bad manifest " + path + ": " + e.what());
    }
  }
  return out;
}

int cmd_simulate(const SimulateArgs& a) {
  std::vector<DegradationProfile> profiles;
  for (const auto& text : a.profiles) profiles.push_back(DegradationProfile::parse(text));
  if (profiles.empty()) profiles.push_back(preset_profile("office-scan"));
  if (a.seeds < 1) throw UsageError("--seeds must be >= 1");

  if (a.rescan > 0) {
    const SweepConfig cfg = a.hostile ? duplication_hostile_config() : a.sheet.grid().front();
    std::ostringstream csv;
    csv << "trial_seed,profile,generation,ber,grid_found,decode_ok,corrected_symbols\n";
    for (const auto& profile : profiles) {
      for (int k = 0; k < a.seeds; ++k) {
        const std::uint64_t s = a.seed + static_cast<std::uint64_t>(k);
        std::mt19937_64 rng(s);
        const SheetLayout layout = layout_for(cfg.sheet);
        ByteStream payload{Bytes(layout.data_bytes_per_page()), Stage::Compressed};
        for (auto& b : payload.bytes) b = static_cast<std::uint8_t>(rng());
        const RasterImage img = render(paginate(payload, cfg.sheet).front(), cfg.sheet, cfg.render_dpi);
        DegradationProfile p = profile;
        p.seed = s * 1000;
        for (const RescanStep& st : rescan_attack(img, a.rescan, p, RescanOptions{cfg.sheet, cfg.render_dpi})) {
          csv << s << ",\"" << profile.to_string() << "\"," << st.generation << "," << st.ber << ","
              << (st.grid_found ? "true" : "false") << "," << (st.decode_ok ? "true" : "false") << ","
              << st.corrected_symbols << "\n";
        }
      }
    }
    write_text(a.out, csv.str());
    return kOk;
  }

  if (!a.images.empty()) {
    const std::vector<std::string> images = expand_manifests(a.images);
    std::ostringstream csv;
    csv << "image,sigma,blur_px,rotation_deg,scale,dot_gain_percent,salt_pepper_rate,seed,ber,corrected_symbols,"
           "payload_recovered\n";
    for (const auto& path : images) {
      const RasterImage img = read_image(path);
      const GridGeometry g = locate_grid(img);
      const CellSample clean = sample_cells(img, g);
      const CellGrid truth{clean.cols, clean.rows, clean.bits};
      const SheetDecode reference = decode_cells(clean, g);
      for (const auto& profile : profiles) {
        for (int k = 0; k < a.seeds; ++k) {
          DegradationProfile p = profile;
          p.seed = a.seed + static_cast<std::uint64_t>(k);
          const RasterImage scan = degrade(img, p);
          double ber = 0.5;
          int corrected = 0;
          bool ok = false;
          try {
            const GridGeometry sg = locate_grid(scan);
            const CellSample cells = sample_cells(scan, sg);
            ber = bit_error_rate(cells, truth);
            const SheetDecode d = decode_cells(cells, sg);
            corrected = d.report.corrected_symbols;
            ok = d.report.complete() && d.page == reference.page;
          } catch (const Error&) {
          }
          csv << path << "," << p.gaussian_noise_sigma << "," << p.blur_radius_px << "," << p.rotation_deg << ","
              << p.scale_factor << "," << p.dot_gain_percent << "," << p.salt_pepper_rate << "," << p.seed << ","
              << ber << "," << corrected << "," << (ok ? "true" : "false") << "\n";
        }
      }
    }
    write_text(a.out, csv.str());
    return kOk;
  }

  const std::vector<SweepConfig> configs = a.hostile ? std::vector{duplication_hostile_config()} : a.sheet.grid();
  const SweepTable table = robustness_sweep(configs, profiles, a.seeds, a.seed);
  write_text(a.out, table.trials_csv());
  if (!a.summary.empty()) write_text(a.summary, table.summary_csv());
  return kOk;
}

// ---------------------------------------------------------------- cost

struct CostArgs {
  std::string figure;
  HddCostParams hdd;
  PrintCostParams print;
  std::string sizes;
  SheetFlags sheet;
  std::string out;
};

std::vector<double> parse_sizes(const std::string& text) {
  if (text.empty()) return default_size_grid();
  const auto range = split(text, ':');
  if (range.size() == 3) {
    const double from = parse_double(range[0], "--sizes"), to = parse_double(range[1], "--sizes"),
                 step = parse_double(range[2], "--sizes");
    if (step <= 0 || to < from) throw UsageError("--sizes range must be FROM:TO:STEP with STEP > 0");
    std::vector<double> out;
    const long n = std::lround(std::floor((to - from) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(from + i * step);
    return out;
  }
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_double(s, "--sizes"));
  if (out.empty()) throw UsageError("--sizes is empty");
  return out;
}

int cmd_cost(const CostArgs& a) {
  if (a.figure == "fig3") {
    validate(a.hdd);
    validate(a.print);
    const auto rows = cost_over_time(a.hdd, a.print);
    write_text(a.out, cost_over_time_csv(rows));
    const auto year = crossover_year(a.hdd, a.print);
    std::cerr << "crossover year: " << (year ? std::to_string(*year) : std::string("never")) << "\n";
    return kOk;
  }
  if (a.figure == "fig2") {
    if (!(a.print.cost_per_page_usd > 0)) throw UsageError("--page-cost must be positive");
    const SheetConfig config = a.sheet.single();
    write_text(a.out, pages_and_cost_csv(pages_and_cost_series(parse_sizes(a.sizes), config, a.print.cost_per_page_usd)));
    return kOk;
  }
  throw UsageError("cost expects fig2 or fig3");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Printable paper data sheets: encode, decode, inspect, simulate, cost"};
  app.require_subcommand(1);

  EncodeArgs enc;
  auto* encode = app.add_subcommand("encode", "Encode a file into page images and a manifest");
  encode->add_option("input", enc.input, "File to encode")->required();
  encode->add_option("--out", enc.out, "Output directory")->capture_default_str();
  encode->add_flag("--allow-large", enc.allow_large, "Lift the input size limit");
  encode->add_option("--format", enc.format, "Image format: png, pgm or pbm")->capture_default_str();
  enc.sheet.add_to(encode, false);

  DecodeArgs dec;
  auto* decode = app.add_subcommand("decode", "Decode page images back into the original file");
  decode->add_option("images", dec.images, "Page images, any order")->required();
  decode->add_option("--out", dec.out, "Recovered file")->required();
  decode->add_option("--report", dec.report, "Write the JSON decode report here");
  decode->add_flag("--json", dec.json_output, "Print the report as JSON");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Print geometry and header of one page image");
  inspect->add_option("image", inspect_path, "Page image")->required();

  SheetFlags cap_sheet;
  auto* capacity = app.add_subcommand("capacity", "Itemize the per-page capacity of a configuration");
  cap_sheet.add_to(capacity, false);

  std::string degrade_in, degrade_out, degrade_profile = "office-scan";
  std::uint64_t degrade_seed = 1;
  auto* degrade_cmd = app.add_subcommand("degrade", "Pass one page image through the simulated print-scan channel");
  degrade_cmd->add_option("image", degrade_in, "Page image")->required();
  degrade_cmd->add_option("--out", degrade_out, "Degraded image path")->required();
  degrade_cmd->add_option("--profile", degrade_profile, "Degradation profile")->capture_default_str();
  degrade_cmd->add_option("--seed", degrade_seed, "Noise seed")->capture_default_str();

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run print-scan channel simulations");
  simulate->add_option("images", sim.images, "Degrade these page images or manifests instead of synthetic pages");
  simulate->add_option("--profile", sim.profiles,
                       "Degradation profile: preset name and/or k=v list (sigma, blur, rotation, scale, gain, salt); "
                       "repeat for a grid");
  simulate->add_option("--seeds", sim.seeds, "Trials per grid cell")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "First seed")->capture_default_str();
  simulate->add_option("--rescan", sim.rescan, "Run the reprint attack for this many copy generations");
  simulate->add_flag("--hostile", sim.hostile, "Use the duplication-hostile configuration");
  simulate->add_option("--out", sim.out, "CSV output path (default stdout)");
  simulate->add_option("--summary", sim.summary, "Per-cell summary CSV path");
  sim.sheet.page = "3x3";
  sim.sheet.add_to(simulate, true);

  CostArgs cost;
  auto* cost_cmd = app.add_subcommand("cost", "Emit cost model CSVs");
  cost_cmd->add_option("figure", cost.figure, "fig2 (pages and cost by size) or fig3 (cost over time)")->required();
  cost_cmd->add_option("--unit-cost", cost.hdd.unit_cost_usd, "Drive price, USD")->capture_default_str();
  cost_cmd->add_option("--lifespan", cost.hdd.lifespan_years, "Drive lifespan, years")->capture_default_str();
  cost_cmd->add_option("--watts", cost.hdd.power_watts, "Drive power draw, W")->capture_default_str();
  cost_cmd->add_option("--kwh-price", cost.hdd.electricity_usd_per_kwh, "Electricity, USD per kWh")
      ->capture_default_str();
  cost_cmd->add_option("--horizon", cost.hdd.horizon_years, "Years to model")->capture_default_str();
  cost_cmd->add_option("--discount-rate", cost.hdd.discount_rate, "Annual discount rate")->capture_default_str();
  cost_cmd->add_option("--page-cost", cost.print.cost_per_page_usd, "Print cost per page, USD")->capture_default_str();
  cost_cmd->add_option("--pages", cost.print.page_count, "Pages printed")->capture_default_str();
  cost_cmd->add_option("--sizes", cost.sizes, "fig2 sizes in MB: FROM:TO:STEP or a list (default 0.5:10:0.1)");
  cost_cmd->add_option("--out", cost.out, "CSV output path (default stdout)");
  cost.sheet.add_to(cost_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*encode) return cmd_encode(enc);
    if (*decode) return cmd_decode(dec);
    if (*inspect) return cmd_inspect(inspect_path);
    if (*capacity) {
      std::cout << page_capacity(cap_sheet.single()).itemize();
      return kOk;
    }
    if (*degrade_cmd) {
      DegradationProfile p = DegradationProfile::parse(degrade_profile);
      p.seed = degrade_seed;
      const RasterImage img = read_image(degrade_in);
      write_image(degrade(img, p), degrade_out, ImageFormat::Png);
      return kOk;
    }
    if (*simulate) return cmd_simulate(sim);
    if (*cost_cmd) return cmd_cost(cost);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
