#include <gtest/gtest.h>

#include <cmath>

#include "lidarsim/error.hpp"
#include "lidarsim/vkitti_tables.hpp"

namespace lidarsim {
namespace {

const char* kBbox =
    "frame cameraID trackID left right top bottom number_pixels truncation_ratio occupancy_ratio "
    "isMoving\n"
    "0 0 1 100 200 150 190 2000 0.0 0.95 False\n"
    "0 1 1 90 190 150 190 2000 0.0 0.95 False\n"
    "0 0 0 300 400 120 180 3000 0.2 0.40 True\n"
    "1 0 1 105 205 150 191 2000 0.0 0.02 False\n"
    "1 0 7 1 2 3 4 5 0.0 0.5 False\n";

const char* kPose =
    "frame cameraID trackID alpha width height length world_space_X world_space_Y world_space_Z "
    "rotation_world_y rotation_world_x rotation_world_z camera_space_X camera_space_Y "
    "camera_space_Z rotation_camera_y rotation_camera_x rotation_camera_z\n"
    "0 0 1 -1.5 1.8 1.5 4.2 0 0 0 0 0 0 2.0 1.6 20.0 -1.4 0 0\n"
    "0 0 0 0.3 2.0 3.0 8.0 0 0 0 0 0 0 -5.0 1.7 40.0 0.1 0 0\n"
    "1 0 1 -1.5 1.8 1.5 4.2 0 0 0 0 0 0 2.1 1.6 19.0 -1.4 0 0\n";

const char* kInfo = "trackID label model color\n0 Truck t1 red\n1 Car c1 blue\n";

TEST(VkittiTable, ParsesHeaderAndCells) {
  const auto t = vkitti::Table::parse(kBbox);
  EXPECT_EQ(t.row_count(), 5U);
  EXPECT_EQ(t.column("left"), 3U);
  EXPECT_FALSE(t.find_column("nope"));
  EXPECT_DOUBLE_EQ(t.number(2, t.column("occupancy_ratio")), 0.40);
  EXPECT_EQ(t.cell(2, t.column("isMoving")), "True");
}

TEST(VkittiTable, Errors) {
  const auto t = vkitti::Table::parse(kBbox);
  EXPECT_THROW(t.column("nope"), MissingFieldError);
  try {
    t.number(0, t.column("isMoving"));
    FAIL();
  } catch (const LineParseError& e) {
    EXPECT_EQ(e.line_number(), 2U);
  }
  EXPECT_THROW(vkitti::Table::parse("a b c\n1 2\n"), LineParseError);
}

TEST(VkittiJoin, JoinsByFrameTrackAndCamera) {
  const auto bbox = vkitti::Table::parse(kBbox);
  const auto pose = vkitti::Table::parse(kPose);
  const auto info = vkitti::Table::parse(kInfo);
  const auto objects = vkitti::join_objects(bbox, pose, &info, 0);
  // Track 7 has no pose row; camera 1 rows are ignored.
  ASSERT_EQ(objects.size(), 3U);
  EXPECT_EQ(objects[0].frame, 0);
  EXPECT_EQ(objects[0].track_id, 0);
  EXPECT_EQ(objects[0].label, "Truck");
  EXPECT_DOUBLE_EQ(objects[0].occlusion_fraction, 0.6);
  EXPECT_DOUBLE_EQ(objects[0].truncation, 0.2);
  EXPECT_DOUBLE_EQ(objects[0].z, 40.0);
  EXPECT_DOUBLE_EQ(objects[0].alpha, 0.3);
  EXPECT_EQ(objects[1].label, "Car");
  EXPECT_DOUBLE_EQ(objects[1].left, 100.0);
  EXPECT_EQ(objects[2].frame, 1);
  EXPECT_NEAR(objects[2].occlusion_fraction, 0.98, 1e-12);
}

TEST(VkittiJoin, AlphaDerivedWhenAbsent) {
  const auto bbox = vkitti::Table::parse(
      "frame trackID left right top bottom truncation_ratio occupancy_ratio\n"
      "0 3 1 2 1 2 0 1\n");
  const auto pose = vkitti::Table::parse(
      "frame trackID width height length camera_space_X camera_space_Y camera_space_Z "
      "rotation_camera_y\n0 3 1 1 1 10 1 10 0.5\n");
  const auto objects = vkitti::join_objects(bbox, pose, nullptr, 0);
  ASSERT_EQ(objects.size(), 1U);
  EXPECT_NEAR(objects[0].alpha, 0.5 - std::atan2(10.0, 10.0), 1e-12);
  EXPECT_EQ(objects[0].label, "Car");
}

TEST(VkittiCamera, IntrinsicsAndExtrinsics) {
  const auto intr = vkitti::Table::parse(
      "frame cameraID K[0,0] K[1,1] K[0,2] K[1,2]\n"
      "0 0 725.0087 725.0087 620.5 187\n0 1 725.0087 725.0087 620.5 187\n"
      "1 0 700 701 600 180\n");
  const auto k = vkitti::intrinsics_for(intr, 1, 0);
  EXPECT_DOUBLE_EQ(k.fx, 700.0);
  EXPECT_DOUBLE_EQ(k.fy, 701.0);
  EXPECT_DOUBLE_EQ(k.cx, 600.0);
  EXPECT_DOUBLE_EQ(k.cy, 180.0);
  EXPECT_THROW(vkitti::intrinsics_for(intr, 5, 0), Error);

  const auto ext = vkitti::Table::parse(
      "frame cameraID r1,1 r1,2 r1,3 t1 r2,1 r2,2 r2,3 t2 r3,1 r3,2 r3,3 t3 0 0 0 1\n"
      "0 0 1 0 0 5 0 1 0 6 0 0 1 7 0 0 0 1\n");
  const Eigen::Matrix4d m = vkitti::extrinsic_for(ext, 0, 0);
  EXPECT_DOUBLE_EQ(m(0, 3), 5.0);
  EXPECT_DOUBLE_EQ(m(2, 3), 7.0);
  EXPECT_DOUBLE_EQ(m(3, 3), 1.0);
}

}  // namespace
}  // namespace lidarsim
