#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mrpods/channel.hpp"
#include "mrpods/cost.hpp"
#include "mrpods/error.hpp"
#include "mrpods/image_io.hpp"

namespace py = pybind11;
using namespace mrpods;

namespace {

Bytes to_bytes(const py::bytes& b) {
  const std::string_view view = b;
  return Bytes(view.begin(), view.end());
}

py::bytes from_bytes(std::span<const std::uint8_t> b) {
  return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
}

HddCostParams hdd_params(double unit_cost, int lifespan, double watts, double kwh_price, int horizon,
                         double discount_rate) {
  return HddCostParams{unit_cost, lifespan, watts, kwh_price, horizon, discount_rate};
}

}  // namespace

PYBIND11_MODULE(_mrpods, m) {
  m.doc() = "Printable paper data sheets";
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  m.def(
      "compress",
      [](const py::bytes& data, bool allow_large) {
        CompressOptions options;
        options.allow_large = allow_large;
        return from_bytes(compress_bytes(to_bytes(data), options).first);
      },
      py::arg("data"), py::arg("allow_large") = false, "BWT + MTF + Huffman into an MRP1 container");
  m.def(
      "decompress", [](const py::bytes& data) { return from_bytes(decompress_bytes(to_bytes(data))); },
      py::arg("data"));
  m.def(
      "container_length", [](const py::bytes& data) { return container_length(to_bytes(data)); },
      py::arg("data"));

  m.def(
      "rs_encode",
      [](const py::bytes& data, int n, int k) { return from_bytes(rs_encode(to_bytes(data), RsParams{n, k, {}}).symbols); },
      py::arg("data"), py::arg("n"), py::arg("k"), "Systematic Reed-Solomon codeword over GF(256)");
  m.def(
      "rs_decode",
      [](const py::bytes& symbols, int n, int k, const std::vector<int>& erasures) {
        Codeword word{to_bytes(symbols), {}};
        if (!erasures.empty()) {
          word.erasures.assign(word.symbols.size(), false);
          for (int e : erasures) word.erasures.at(static_cast<std::size_t>(e)) = true;
        }
        const RsDecodeResult r = rs_decode(word, RsParams{n, k, {}});
        return py::make_tuple(from_bytes(r.data), r.errors, r.erasures);
      },
      py::arg("symbols"), py::arg("n"), py::arg("k"), py::arg("erasures") = std::vector<int>{},
      "Returns (data, errors, erasures); raises Error when uncorrectable");

  py::class_<SheetConfig>(m, "SheetConfig")
      .def(py::init<>())
      .def_readwrite("dots_per_inch", &SheetConfig::dots_per_inch)
      .def_readwrite("dot_size_percent", &SheetConfig::dot_size_percent)
      .def_property(
          "redundancy", [](const SheetConfig& c) { return c.redundancy.to_string(); },
          [](SheetConfig& c, const std::string& text) { c.redundancy = RedundancyRatio::parse(text); })
      .def_readwrite("page_width_in", &SheetConfig::page_width_in)
      .def_readwrite("page_height_in", &SheetConfig::page_height_in)
      .def_readwrite("margin_in", &SheetConfig::margin_in)
      .def_readwrite("omit_total_pages", &SheetConfig::omit_total_pages)
      .def("validate", [](const SheetConfig& c) { validate(c); });

  m.def(
      "page_capacity",
      [](const SheetConfig& config) {
        const CapacityReport r = page_capacity(config);
        py::dict d;
        d["grid_cols"] = r.grid_cols;
        d["grid_rows"] = r.grid_rows;
        d["rs_n"] = r.rs.n;
        d["rs_k"] = r.rs.k;
        d["raw_dots"] = r.raw_dots;
        d["stream_bytes"] = r.stream_bytes;
        d["parity_bytes"] = r.parity_bytes;
        d["usable_payload_bytes"] = r.usable_payload_bytes;
        d["itemized"] = r.itemize();
        return d;
      },
      py::arg("config"));

  m.def(
      "encode_pages",
      [](const py::bytes& data, const SheetConfig& config, int render_dpi) {
        const Bytes raw = to_bytes(data);
        std::vector<Page> pages;
        {
          py::gil_scoped_release release;
          pages = paginate(compress(ByteStream{raw, Stage::Raw}).first, config);
        }
        py::list out;
        for (const Page& page : pages) {
          Bytes png;
          {
            py::gil_scoped_release release;
            png = encode_png(render(page, config, render_dpi));
          }
          out.append(from_bytes(png));
        }
        return out;
      },
      py::arg("data"), py::arg("config") = SheetConfig{}, py::arg("render_dpi") = 600,
      "Compress, paginate and render; returns one PNG per page");

  m.def(
      "decode_images",
      [](const std::vector<py::bytes>& images) {
        std::vector<Bytes> files;
        for (const auto& img : images) files.push_back(to_bytes(img));
        std::vector<Page> pages;
        std::vector<std::string> errors;
        AssembleResult assembled;
        {
          py::gil_scoped_release release;
          for (const Bytes& f : files) {
            try {
              pages.push_back(decode_sheet(decode_png(f)).page);
            } catch (const Error& e) {
              errors.emplace_back(e.what());
            }
          }
          assembled = pages.empty() ? AssembleResult{MissingReport{{}, {}, true, "no page decoded"}} : assemble(pages);
        }
        py::dict d;
        d["errors"] = errors;
        if (const auto* stream = std::get_if<ByteStream>(&assembled)) {
          d["status"] = "complete";
          d["data"] = from_bytes(decompress(*stream).bytes);
        } else {
          const auto& missing = std::get<MissingReport>(assembled);
          d["status"] = pages.empty() ? "none" : "partial";
          d["data"] = py::none();
          d["missing_pages"] = missing.missing_pages;
          d["damaged_pages"] = missing.damaged_pages;
        }
        return d;
      },
      py::arg("images"), "Decode PNG page images in any order");

  py::class_<DegradationProfile>(m, "DegradationProfile")
      .def(py::init<>())
      .def_static("parse", &DegradationProfile::parse)
      .def_readwrite("gaussian_noise_sigma", &DegradationProfile::gaussian_noise_sigma)
      .def_readwrite("blur_radius_px", &DegradationProfile::blur_radius_px)
      .def_readwrite("rotation_deg", &DegradationProfile::rotation_deg)
      .def_readwrite("scale_factor", &DegradationProfile::scale_factor)
      .def_readwrite("dot_gain_percent", &DegradationProfile::dot_gain_percent)
      .def_readwrite("salt_pepper_rate", &DegradationProfile::salt_pepper_rate)
      .def_readwrite("seed", &DegradationProfile::seed)
      .def("__str__", &DegradationProfile::to_string);

  m.def(
      "degrade_png",
      [](const py::bytes& png, const DegradationProfile& profile) {
        const Bytes in = to_bytes(png);
        Bytes out;
        {
          py::gil_scoped_release release;
          out = encode_png(degrade(decode_png(in), profile));
        }
        return from_bytes(out);
      },
      py::arg("png"), py::arg("profile"));

  m.def(
      "hdd_cumulative_cost",
      [](int year, double unit_cost, int lifespan, double watts, double kwh_price, int horizon) {
        return hdd_cumulative_cost(hdd_params(unit_cost, lifespan, watts, kwh_price, horizon, 0.0), year);
      },
      py::arg("year"), py::arg("unit_cost") = 40.0, py::arg("lifespan") = 5, py::arg("watts") = 6.0,
      py::arg("kwh_price") = 0.15, py::arg("horizon") = 100);
  m.def(
      "crossover_year",
      [](double page_cost, int pages, double unit_cost, int lifespan, double watts, double kwh_price, int horizon) {
        return crossover_year(hdd_params(unit_cost, lifespan, watts, kwh_price, horizon, 0.0),
                              PrintCostParams{page_cost, pages});
      },
      py::arg("page_cost") = 3.0, py::arg("pages") = 20, py::arg("unit_cost") = 40.0, py::arg("lifespan") = 5,
      py::arg("watts") = 6.0, py::arg("kwh_price") = 0.15, py::arg("horizon") = 100,
      "First year the drive cost exceeds the print cost, or None");
  m.def(
      "cost_over_time_csv",
      [](double page_cost, int pages, double unit_cost, int lifespan, double watts, double kwh_price, int horizon) {
        return cost_over_time_csv(cost_over_time(hdd_params(unit_cost, lifespan, watts, kwh_price, horizon, 0.0),
                                                 PrintCostParams{page_cost, pages}));
      },
      py::arg("page_cost") = 3.0, py::arg("pages") = 20, py::arg("unit_cost") = 40.0, py::arg("lifespan") = 5,
      py::arg("watts") = 6.0, py::arg("kwh_price") = 0.15, py::arg("horizon") = 100);
  m.def(
      "pages_and_cost_csv",
      [](const std::vector<double>& sizes_mb, const SheetConfig& config, double page_cost) {
        return pages_and_cost_csv(pages_and_cost_series(sizes_mb, config, page_cost));
      },
      py::arg("sizes_mb"), py::arg("config") = SheetConfig{}, py::arg("page_cost") = 3.0);
}
