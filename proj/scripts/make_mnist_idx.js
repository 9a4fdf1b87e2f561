#!/usr/bin/env node
// Converts the bundled MNIST digit JSON blobs (npm "mnist" package) into a
// standard IDX image/label file pair so the loaders exercise the same code
// path as a canonical MNIST download.
//
// usage: node make_mnist_idx.js <digits-dir> <out-dir> [per-class]

const fs = require('fs');
const path = require('path');

const digitsDir = process.argv[2];
const outDir = process.argv[3];
const perClass = parseInt(process.argv[4] || '110', 10);
if (!digitsDir || !outDir) {
  console.error('usage: node make_mnist_idx.js <digits-dir> <out-dir> [per-class]');
  process.exit(2);
}

const side = 28;
const pixels = side * side;

const images = [];
const labels = [];
for (let digit = 0; digit <= 9; digit++) {
  const raw = JSON.parse(fs.readFileSync(path.join(digitsDir, `${digit}.json`), 'utf8')).data;
  const available = Math.floor(raw.length / pixels);
  const take = Math.min(perClass, available);
  for (let i = 0; i < take; i++) {
    const img = Buffer.alloc(pixels);
    for (let p = 0; p < pixels; p++) {
      img[p] = Math.max(0, Math.min(255, Math.round(raw[i * pixels + p] * 255)));
    }
    images.push(img);
    labels.push(digit);
  }
}

// interleave classes so any prefix is roughly balanced
const order = images.map((_, i) => i);
order.sort((a, b) => (a % perClass) - (b % perClass) || labels[a] - labels[b]);

function be32(v) {
  const b = Buffer.alloc(4);
  b.writeUInt32BE(v >>> 0);
  return b;
}

fs.mkdirSync(outDir, { recursive: true });
const imgOut = [be32(2051), be32(images.length), be32(side), be32(side)];
const labOut = [be32(2049), be32(labels.length)];
for (const i of order) {
  imgOut.push(images[i]);
  labOut.push(Buffer.from([labels[i]]));
}
fs.writeFileSync(path.join(outDir, 'images.idx'), Buffer.concat(imgOut));
fs.writeFileSync(path.join(outDir, 'labels.idx'), Buffer.concat(labOut));
console.log(`wrote ${images.length} images to ${outDir}`);
