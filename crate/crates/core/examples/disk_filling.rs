//! Fill loops with disks and check the isoperimetric bounds
//! `|D| <= c_M |G|^2` and `dist(D, G) <= c_M |G|`.
//!
//! Each disk is written as `disk_<name>.off`.
use std::fs::File;

use hoelder_sr::disks::{fill_disk, loop_corpus, FillConfig};

fn main() -> hoelder_sr::Result<()> {
    let cfg = FillConfig::default();
    println!(
        "{:<16} {:>8} {:>10} {:>10} {:>9} {:>9}",
        "loop", "length", "area", "c_M L^2", "dist", "c_M L"
    );
    for (name, gamma) in loop_corpus(cfg.delta_m, 0).into_iter().take(12) {
        let (disk, r) = fill_disk(&gamma, &cfg)?;
        println!(
            "{name:<16} {:>8.4} {:>10.3e} {:>10.3e} {:>9.4} {:>9.4}  chi = {}",
            r.boundary_length,
            r.area,
            r.area_bound,
            r.max_distance,
            r.distance_bound,
            disk.euler_characteristic()
        );
        disk.write_off(File::create(format!("disk_{name}.off"))?)?;
    }
    Ok(())
}
