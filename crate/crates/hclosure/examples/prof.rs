use hclosure::relations::Relation;
use hclosure::simulation::{verify_covering_simulation, verify_pairing_simulation};
use hclosure::trees::enumerate_t1t2_trees;

fn relation_from_mask(size: usize, mask: u32) -> Relation {
    let mut pairs = Vec::new();
    let mut bit = 0;
    for a in 0..size {
        for b in 0..size {
            if mask & (1 << bit) != 0 {
                pairs.push((a, b));
            }
            bit += 1;
        }
    }
    Relation::new(size, pairs).unwrap()
}

fn main() {
    let mode = std::env::args().nth(1).unwrap_or_else(|| "pair".into());
    let count: usize = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(4096);
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        state
    };
    let mut pass = 0usize;
    for _ in 0..count {
        let m1 = (next() % 512) as u32;
        let m2 = (next() % 512) as u32;
        let t1 = relation_from_mask(3, m1);
        let t2 = relation_from_mask(3, m2);
        pass += match mode.as_str() {
            "cover" => verify_covering_simulation(&t1, &t2, 4).pass as usize,
            "trees" => (enumerate_t1t2_trees(&t1, &t2, 4).unwrap().len() > 0) as usize,
            _ => verify_pairing_simulation(&t1, &t2, 4).pass as usize,
        };
    }
    println!("passes: {pass}/{count}");
}
