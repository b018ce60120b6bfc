#include "polarcut/api.hpp"

#include <httplib.h>

#include <atomic>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "polarcut/error.hpp"
#include "polarcut/metrics.hpp"
#include "polarcut/pipeline.hpp"
#include "polarcut/png.hpp"
#include "polarcut/simd/kernels.hpp"

namespace polarcut::api {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunSummary {
  std::size_t voxels = 0;
  std::optional<double> dsc;
};

struct Session {
  std::string id;
  std::shared_ptr<const Volume> volume;
  std::optional<BinaryMask> reference;
  GraphParams params;

  std::mutex mu;
  std::condition_variable cv;
  bool running = false;
  std::uint64_t next_ticket = 0;
  std::uint64_t pending = 0;  // ticket allowed to run next; 0 = none

  SeedSet seeds;
  std::shared_ptr<const SegmentationResult> last;
  json last_response;
  std::optional<RunSummary> oneclick;
  std::optional<RunSummary> semi;
};

int status_for(const Error& e) {
  const std::string& k = e.kind();
  if (k == errc::seed_out_of_bounds || k == errc::conflicting_constraint) return 422;
  if (k == errc::internal) return 500;
  return 400;
}

void send_error(httplib::Response& res, int status, const std::string& kind, const std::string& msg) {
  res.status = status;
  res.set_content(json{{"error", {{"kind", kind}, {"message", msg}}}}.dump(), "application/json");
}

Vec3 parse_point(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw Error(errc::bad_config, "points need three coordinates");
  return {v[0], v[1], v[2]};
}

std::string random_id() {
  static std::atomic<std::uint64_t> counter{0};
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::ostringstream out;
  out << std::hex << (rng() & 0xffffffffu) << '-' << ++counter;
  return out.str();
}

}  // namespace

struct Service::Impl {
  std::mutex mu;
  std::map<std::string, std::shared_ptr<Session>> sessions;

  std::shared_ptr<Session> find(const std::string& id) {
    std::lock_guard lock(mu);
    const auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  void open(const httplib::Request& req, httplib::Response& res) {
    try {
      auto s = std::make_shared<Session>();
      const std::string type = req.get_header_value("Content-Type");
      if (type.rfind("application/octet-stream", 0) == 0) {
        const fs::path tmp = fs::temp_directory_path() / ("polarcut-upload-" + random_id() + ".nii");
        {
          std::ofstream out(tmp, std::ios::binary);
          out.write(req.body.data(), static_cast<std::streamsize>(req.body.size()));
        }
        try {
          s->volume = std::make_shared<const Volume>(load_volume(tmp, VolumeFormat::nifti1));
        } catch (...) {
          fs::remove(tmp);
          throw;
        }
        fs::remove(tmp);
      } else {
        json body;
        try {
          body = json::parse(req.body);
        } catch (const json::exception& e) {
          throw Error(errc::bad_config, std::string("malformed JSON: ") + e.what());
        }
        if (!body.is_object() || !body.contains("volume") || !body["volume"].is_string())
          throw Error(errc::bad_config, "body needs a \"volume\" path");
        const fs::path path = body["volume"].get<std::string>();
        s->volume = std::make_shared<const Volume>(load_volume(path));
        if (body.contains("reference")) {
          s->reference = load_mask(body["reference"].get<std::string>());
          if (!(s->reference->dims() == s->volume->dims()))
            throw Error(errc::dims_mismatch, "reference mask does not match the volume");
        }
        if (body.contains("params")) s->params = graph_params_from_json(body["params"]);
      }
      s->id = random_id();
      {
        std::lock_guard lock(mu);
        sessions[s->id] = s;
      }
      const Volume& v = *s->volume;
      const auto [lo, hi] = v.intensity_range();
      res.set_content(json{{"session", s->id},
                           {"dims", {v.dims().nx, v.dims().ny, v.dims().nz}},
                           {"spacing_mm", {v.spacing().sx, v.spacing().sy, v.spacing().sz}},
                           {"intensity_range", {lo, hi}}}
                          .dump(),
                      "application/json");
    } catch (const Error& e) {
      send_error(res, 400, e.kind(), e.what());
    } catch (const std::exception& e) {
      send_error(res, 400, errc::bad_config, e.what());
    }
  }

  void slice(const httplib::Request& req, httplib::Response& res) {
    const auto s = find(req.path_params.at("id"));
    if (!s) return send_error(res, 404, "no_such_session", "unknown session");
    const Volume& v = *s->volume;
    long z = -1;
    try {
      z = std::stol(req.path_params.at("z"));
    } catch (const std::exception&) {
    }
    if (z < 0 || z >= static_cast<long>(v.dims().nz))
      return send_error(res, 404, "bad_slice", "slice index out of range");
    auto [lo, hi] = v.intensity_range();
    try {
      if (req.has_param("lo")) lo = std::stof(req.get_param_value("lo"));
      if (req.has_param("hi")) hi = std::stof(req.get_param_value("hi"));
    } catch (const std::exception&) {
      return send_error(res, 400, errc::invalid_argument, "lo and hi must be numbers");
    }
    GrayImage img;
    img.width = static_cast<std::uint32_t>(v.dims().nx);
    img.height = static_cast<std::uint32_t>(v.dims().ny);
    img.pixels.resize(static_cast<std::size_t>(img.width) * img.height);
    const float* plane = v.data().data() + static_cast<std::size_t>(z) * img.pixels.size();
    simd::active().window_u8(plane, img.pixels.size(), lo, hi, img.pixels.data());
    res.set_content(encode_png(img), "image/png");
  }

  void segment_request(const httplib::Request& req, httplib::Response& res) {
    const auto s = find(req.path_params.at("id"));
    if (!s) return send_error(res, 404, "no_such_session", "unknown session");

    SegmentationRequest request;
    bool queue = true;
    try {
      const json body = json::parse(req.body);
      request.seeds.primary = parse_point(body.at("seed"));
      if (body.contains("extra_seeds"))
        for (const auto& p : body.at("extra_seeds")) request.seeds.extras.push_back(parse_point(p));
      request.params = s->params;
      if (body.contains("params")) request.params = graph_params_from_json(body.at("params"), s->params);
      if (body.value("voxel_coords", false)) seeds_to_world(request.seeds, *s->volume);
      queue = body.value("queue", true);
    } catch (const Error& e) {
      return send_error(res, 400, e.kind(), e.what());
    } catch (const json::exception& e) {
      return send_error(res, 400, errc::bad_config, e.what());
    }

    // Latest-wins queue of depth one.
    {
      std::unique_lock lock(s->mu);
      const std::uint64_t ticket = ++s->next_ticket;
      if (s->running) {
        if (!queue) return send_error(res, 409, "busy", "a segmentation is already running");
        s->pending = ticket;
        s->cv.notify_all();
        s->cv.wait(lock, [&] { return s->pending != ticket || !s->running; });
        if (s->pending != ticket)
          return send_error(res, 409, "superseded", "a newer segmentation request replaced this one");
        s->pending = 0;
      }
      s->running = true;
    }

    json response;
    int status = 200;
    std::shared_ptr<const SegmentationResult> result;
    try {
      result = std::make_shared<const SegmentationResult>(segment(*s->volume, request));
      response = stats_json(*result);
      response["contours"] = contours_json(*result, *s->volume);
      RunSummary summary{result->mask.count(), std::nullopt};
      if (s->reference) {
        summary.dsc = dsc(result->mask, *s->reference);
        response["dsc"] = *summary.dsc;
      }
      std::lock_guard lock(s->mu);
      s->seeds = request.seeds;
      s->last = result;
      s->last_response = response;
      (request.seeds.extras.empty() ? s->oneclick : s->semi) = summary;
    } catch (const Error& e) {
      status = status_for(e);
      response = {{"error", {{"kind", e.kind()}, {"message", e.what()}}}};
    } catch (const std::exception& e) {
      status = 500;
      response = {{"error", {{"kind", errc::internal}, {"message", e.what()}}}};
    }
    {
      std::lock_guard lock(s->mu);
      s->running = false;
    }
    s->cv.notify_all();
    res.status = status;
    res.set_content(response.dump(), "application/json");
  }

  void export_result(const httplib::Request& req, httplib::Response& res) {
    const auto s = find(req.path_params.at("id"));
    if (!s) return send_error(res, 404, "no_such_session", "unknown session");
    const std::string what = req.path_params.at("what");
    std::shared_ptr<const SegmentationResult> last;
    std::optional<RunSummary> oneclick, semi;
    {
      std::lock_guard lock(s->mu);
      last = s->last;
      oneclick = s->oneclick;
      semi = s->semi;
    }
    if (what == "csv") {
      if (!oneclick && !semi) return send_error(res, 404, "no_result", "no segmentation yet");
      CaseStats c;
      c.id = s->id;
      c.spacing = s->volume->spacing();
      c.vox_manual = s->reference ? s->reference->count() : 0;
      const RunSummary one = oneclick ? *oneclick : *semi;
      const RunSummary sem = semi ? *semi : *oneclick;
      c.vox_oneclick = one.voxels;
      c.vox_semi = sem.voxels;
      c.dsc_oneclick = one.dsc.value_or(0.0);
      c.dsc_semi = sem.dsc.value_or(0.0);
      res.set_content(case_csv_header() + "\n" + case_csv_row(c) + "\n", "text/csv");
      return;
    }
    if (!last) return send_error(res, 404, "no_result", "no segmentation yet");
    if (what == "mask") {
      const std::vector<char> bytes = encode_mask_nifti(last->mask);
      res.set_content(std::string(bytes.begin(), bytes.end()), "application/octet-stream");
      res.set_header("Content-Disposition", "attachment; filename=\"mask.nii\"");
    } else if (what == "mesh") {
      std::ostringstream out;
      write_obj(last->mesh, out);
      res.set_content(out.str(), "text/plain");
      res.set_header("Content-Disposition", "attachment; filename=\"mesh.obj\"");
    } else {
      send_error(res, 404, "unknown_export", "export must be mask, mesh or csv");
    }
  }
};

Service::Service() : impl_(std::make_unique<Impl>()) {}
Service::~Service() = default;

void Service::mount(httplib::Server& server) {
  Impl* impl = impl_.get();
  server.Post("/session", [impl](const httplib::Request& q, httplib::Response& r) { impl->open(q, r); });
  server.Get("/session/:id/slice/:z",
             [impl](const httplib::Request& q, httplib::Response& r) { impl->slice(q, r); });
  server.Post("/session/:id/segment",
              [impl](const httplib::Request& q, httplib::Response& r) { impl->segment_request(q, r); });
  server.Get("/session/:id/export/:what",
             [impl](const httplib::Request& q, httplib::Response& r) { impl->export_result(q, r); });
}

int serve(const std::string& host, int port) {
  httplib::Server server;
  Service service;
  service.mount(server);
  return server.listen(host, port) ? 0 : 1;
}

}  // namespace polarcut::api
