#pragma once

#include <map>

#include "ads/periodic_mesh.hpp"

namespace ads::test {

// Non-periodic icosphere of radius r with outward orientation.
inline TriMesh icosphere(double r, int subdivisions) {
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    TriMesh m;
    m.periodic = false;
    m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                  {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
    m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
               {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
               {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (auto& v : m.vertices) v.normalize();
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> mid;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = mid.find(key);
            if (it != mid.end()) return it->second;
            m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
            const int id = static_cast<int>(m.vertices.size()) - 1;
            mid.emplace(key, id);
            return id;
        };
        std::vector<Face> faces;
        for (const Face& f : m.faces) {
            const int a = midpoint(f[0], f[1]), b = midpoint(f[1], f[2]), c = midpoint(f[2], f[0]);
            faces.push_back({f[0], a, c});
            faces.push_back({f[1], b, a});
            faces.push_back({f[2], c, b});
            faces.push_back({a, b, c});
        }
        m.faces = std::move(faces);
    }
    for (auto& v : m.vertices) v *= r;
    return m;
}

// Open cylinder patch of radius r around the z axis, outward orientation.
inline TriMesh cylinder(double r, int around, int along, double height) {
    TriMesh m;
    m.periodic = false;
    for (int j = 0; j <= along; ++j)
        for (int i = 0; i < around; ++i) {
            const double a = 2.0 * M_PI * (i + 0.5 * (j % 2)) / around;
            m.vertices.emplace_back(r * std::cos(a), r * std::sin(a), height * j / along);
        }
    auto id = [around](int i, int j) { return j * around + ((i % around) + around) % around; };
    for (int j = 0; j < along; ++j)
        for (int i = 0; i < around; ++i) {
            if (j % 2 == 0) {
                m.faces.push_back({id(i, j), id(i + 1, j), id(i, j + 1)});
                m.faces.push_back({id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
            } else {
                m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
                m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            }
        }
    return m;
}

}  // namespace ads::test
