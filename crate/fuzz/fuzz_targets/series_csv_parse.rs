#![no_main]

use boussinesq_cli::output::{read_series, write_series};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(series) = read_series(data) {
        let mut first = Vec::new();
        write_series(&mut first, &series).expect("in-memory write");
        let reread = read_series(first.as_slice()).expect("written table parses");
        let mut second = Vec::new();
        write_series(&mut second, &reread).expect("in-memory write");
        assert_eq!(first, second);
    }
});
