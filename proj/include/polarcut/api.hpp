#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

namespace httplib {
class Server;
}

namespace polarcut::api {

/// REST frontend for interactive refinement. Sessions hold a loaded volume,
/// the latest seed set and result; segmentation requests within a session are
/// serialized with a latest-wins queue of depth one.
///
///   POST /session                      {"volume": path, "reference"?: path, "params"?: {...}}
///                                      or a NIfTI-1 body (application/octet-stream)
///   GET  /session/{id}/slice/{z}?lo=&hi=   8-bit PNG of axial slice z
///   POST /session/{id}/segment         {"seed": [x,y,z], "extra_seeds": [...], "params"?: {...},
///                                       "voxel_coords"?: bool, "queue"?: bool}
///   GET  /session/{id}/export/{mask|mesh|csv}
class Service {
public:
  Service();
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void mount(httplib::Server& server);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Blocks serving on host:port until the process is stopped.
int serve(const std::string& host, int port);

}  // namespace polarcut::api
