use qhall::verify::criteria;
use rayon::prelude::*;
use std::time::Instant;

fn main() {
    let list = criteria();
    let results: Vec<_> = list
        .par_iter()
        .map(|c| {
            let t = Instant::now();
            let r = (c.run)();
            (r, t.elapsed())
        })
        .collect();
    let mut failed = 0;
    for (c, (r, dt)) in list.iter().zip(results) {
        match r {
            Ok(detail) => println!("PASS {:>2} {:<15} {} ({}; {:.1}s)", c.id, c.name, c.title, detail, dt.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {:<15} {}: {}", c.id, c.name, c.title, e);
            }
        }
    }
    println!("{} of {} criteria passed", list.len() - failed, list.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
