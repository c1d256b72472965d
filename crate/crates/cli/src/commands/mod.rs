// SPDX-License-Identifier: Apache-2.0

pub mod fit;
pub mod floorplan;
pub mod interconnect;
pub mod paths;
pub mod size;
pub mod solve;
