// Browser entry point: candidates come from the query string, e.g.
// index.html?a=daiba_park&b=trick_art_museum&rec=trick_art_museum

import { mountApp } from './app';

const params = new URLSearchParams(window.location.search);
const candidateA = params.get('a') ?? 'daiba_park';
const candidateB = params.get('b') ?? 'trick_art_museum';
const recommended = params.get('rec') ?? candidateB;
const baseUrl = params.get('api') ?? 'http://127.0.0.1:8000';

mountApp(document, baseUrl, { candidateA, candidateB, recommended });
