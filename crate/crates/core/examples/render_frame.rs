//! Writes the image observation for a task's opening state to a PNG.
//! Larger frames show more tiles at the same tile size.
//!
//!     cargo run --example render_frame [task] [width] [height] [out.png]

use valleybench::content::Content;
use valleybench::observation::payload::encode_png;
use valleybench::observation::render_visual;
use valleybench::observation::visual::field_of_view;
use valleybench::tasks::{setup_task, TaskSuite};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let task = args.first().map(String::as_str).unwrap_or("kill_5_grub_with_rusty_sword");
    let width: u32 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1280);
    let height: u32 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(720);
    let out = args.get(3).cloned().unwrap_or_else(|| "frame.png".into());

    let content = Content::shared();
    let spec = TaskSuite::bundled().get(task).expect("unknown task");
    let (world, _) = setup_task(&content, spec, 1).unwrap();
    let t0 = std::time::Instant::now();
    let v = render_visual(&world, &content.pack, width, height, 32).unwrap_or_else(|e| panic!("{e}"));
    let png = encode_png(&v).unwrap();
    let ms = t0.elapsed().as_secs_f64() * 1e3;
    std::fs::write(&out, &png).unwrap();
    let (cols, rows) = field_of_view(width, height, 32);
    println!(
        "{out}: {width}x{height}, {cols}x{rows} tiles around {:?} on {}, {} bytes in {ms:.1} ms",
        world.player.pos(),
        world.player.map,
        png.len()
    );
}
