//! Serve an instance on a local port and drive it as a remote client:
//! reset, step, pause, switch modality, decode the image.
//!
//!     cargo run --example tcp_session

use valleybench::content::Content;
use valleybench::env::{Env, EnvConfig};
use valleybench::observation::{Modality, ObsConfig};
use valleybench::protocol::{Client, Server};
use valleybench::tasks::TaskSuite;

fn main() {
    let env = Env::new(
        Content::shared(),
        std::sync::Arc::new(TaskSuite::bundled().clone()),
        EnvConfig::default(),
    );
    let server = Server::bind("127.0.0.1:0", env).expect("bind").spawn();
    println!("server on {}", server.addr);

    let mut c = Client::connect(server.addr).unwrap();
    let text_only = EnvConfig {
        observation: ObsConfig {
            modality: Modality::TextOnly,
            ..Default::default()
        },
        ..Default::default()
    };
    c.configure(text_only).unwrap();
    let out = c.reset("go_to_coop", 3).unwrap();
    println!("reset: image sent? {}", out.observation.image.is_some());

    let out = c.step(&["move(x=5, y=7)", "interact(direction=\"down\")"]).unwrap();
    println!("now in {}", out.observation.text.as_ref().unwrap().location);

    let status = c.pause().unwrap().status;
    println!("paused={}", status.paused);
    c.resume().unwrap();

    // Three actions is a protocol error; the connection stays usable.
    let a = "use(direction=\"up\")";
    match c.step(&[a, a, a]) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }

    let mut image_only = text_only;
    image_only.observation.modality = Modality::ImageOnly;
    c.configure(image_only).unwrap();
    let out = c.observe().unwrap();
    let img = out.observation.image.as_ref().unwrap();
    let v = img.decode().unwrap();
    println!(
        "image {}x{} ({} base64 bytes), text sent? {}",
        v.width,
        v.height,
        img.png.len(),
        out.observation.text.is_some()
    );

    let out = c.step(&["move(x=15, y=5)", "interact(direction=\"up\")"]).unwrap();
    println!("completed={} after {} steps", out.eval.completed, out.steps_used);
    c.shutdown().unwrap();
    server.join().unwrap();
}
