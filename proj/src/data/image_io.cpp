#include "cogan/data/image_io.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "cogan/error.hpp"

namespace cogan::data {

torch::Tensor load_image(const std::filesystem::path& path, int side, int channels) {
  cv::Mat raw = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (raw.empty()) fail("unreadable image: " + path.string());

  cv::Mat rgb;
  switch (raw.channels()) {
    case 1: rgb = raw; break;
    case 3: cv::cvtColor(raw, rgb, cv::COLOR_BGR2RGB); break;
    case 4: cv::cvtColor(raw, rgb, cv::COLOR_BGRA2RGB); break;
    default: fail("unsupported channel count in " + path.string());
  }

  const double scale = raw.depth() == CV_16U ? 1.0 / 65535.0 : raw.depth() == CV_8U ? 1.0 / 255.0 : 1.0;
  cv::Mat unit;
  rgb.convertTo(unit, CV_32F, scale);

  cv::Mat resized;
  if (unit.rows == side && unit.cols == side) {
    resized = unit;
  } else {
    cv::resize(unit, resized, cv::Size(side, side), 0, 0, cv::INTER_LINEAR);
  }
  if (!resized.isContinuous()) resized = resized.clone();

  const int c = resized.channels();
  auto hwc = torch::from_blob(resized.data, {side, side, c}, torch::kFloat32);
  auto chw = hwc.permute({2, 0, 1}).contiguous().clone();
  if (c == channels) return chw;
  if (c == 1) return chw.expand({channels, side, side}).contiguous();
  if (channels == 1) return chw.mean(0, /*keepdim=*/true);
  fail("cannot map " + std::to_string(c) + " channels to " + std::to_string(channels) + " for " + path.string());
}

void write_png(const std::filesystem::path& path, const torch::Tensor& image) {
  TORCH_CHECK(image.dim() == 3, "write_png expects C×H×W");
  const auto c = image.size(0);
  if (c != 1 && c != 3) fail("write_png supports 1 or 3 channels");
  auto bytes = image.detach()
                   .to(torch::kFloat32)
                   .clamp(0.0, 1.0)
                   .mul(255.0)
                   .round()
                   .to(torch::kUInt8)
                   .permute({1, 2, 0})
                   .contiguous();
  const int h = static_cast<int>(bytes.size(0));
  const int w = static_cast<int>(bytes.size(1));
  cv::Mat mat(h, w, c == 1 ? CV_8UC1 : CV_8UC3, bytes.data_ptr<std::uint8_t>());
  cv::Mat out;
  if (c == 3) {
    cv::cvtColor(mat, out, cv::COLOR_RGB2BGR);
  } else {
    out = mat;
  }
  std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), out)) fail("cannot write image: " + path.string());
}

}  // namespace cogan::data
