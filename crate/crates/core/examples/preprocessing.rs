// Tokenize, drop stopwords and stem a snippet of report text.

use std::error::Error;

use cta_cluster::preprocess::{preprocess_text, stem, tokenize, StopWords};

fn main() -> Result<(), Box<dyn Error>> {
    let text = "The attackers were running spear-phishing campaigns against ministries in 2021.";
    let stopwords = StopWords::english();

    println!("tokens: {:?}", tokenize(text));
    println!("terms:  {:?}", preprocess_text(text, &stopwords));

    for word in ["exfiltration", "vulnerabilities", "generously"] {
        println!("{word} -> {}", stem(word));
    }
    Ok(())
}
