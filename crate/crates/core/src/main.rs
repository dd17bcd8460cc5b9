fn main() { println!("g2res"); }
