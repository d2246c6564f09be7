// 3D preview of reconstructed structure meshes. Renders OBJ text fetched
// from the server; there is no client-side reconstruction.

import * as THREE from "three";
import type { ParsedMesh } from "./objparse.js";

export class MeshPreview {
  private renderer: THREE.WebGLRenderer;
  private scene: THREE.Scene;
  private camera: THREE.PerspectiveCamera;
  private meshes = new Map<string, THREE.Mesh>();
  private frame = 0;
  private running = false;

  constructor(private canvas: HTMLCanvasElement) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true, alpha: true });
    this.scene = new THREE.Scene();
    this.camera = new THREE.PerspectiveCamera(45, 1, 0.1, 10_000);
    this.camera.position.set(0, 0, 100);
    this.scene.add(new THREE.AmbientLight(0xffffff, 0.55));
    const key = new THREE.DirectionalLight(0xffffff, 0.9);
    key.position.set(1, 1, 2);
    this.scene.add(key);
    this.resize(canvas.clientWidth || 320, canvas.clientHeight || 320);
  }

  /** Install or replace the mesh for one structure, tinted with `color`. */
  setStructure(label: string, parsed: ParsedMesh, color: string): void {
    this.removeStructure(label);
    const geometry = new THREE.BufferGeometry();
    geometry.setAttribute("position", new THREE.BufferAttribute(parsed.positions, 3));
    geometry.setIndex(new THREE.BufferAttribute(parsed.indices, 1));
    geometry.computeVertexNormals();
    const material = new THREE.MeshStandardMaterial({
      color: new THREE.Color(color),
      flatShading: true,
      side: THREE.DoubleSide,
    });
    const mesh = new THREE.Mesh(geometry, material);
    this.meshes.set(label, mesh);
    this.scene.add(mesh);
    this.frameAll();
  }

  removeStructure(label: string): void {
    const old = this.meshes.get(label);
    if (old === undefined) return;
    this.scene.remove(old);
    old.geometry.dispose();
    (old.material as THREE.Material).dispose();
    this.meshes.delete(label);
  }

  /** Fit the camera to everything currently loaded. */
  private frameAll(): void {
    if (this.meshes.size === 0) return;
    const box = new THREE.Box3();
    for (const mesh of this.meshes.values()) box.expandByObject(mesh);
    const center = box.getCenter(new THREE.Vector3());
    const sphere = box.getBoundingSphere(new THREE.Sphere());
    const dist = Math.max(sphere.radius, 1) / Math.tan((this.camera.fov * Math.PI) / 360);
    this.camera.position.set(center.x, center.y, center.z + dist * 1.4);
    this.camera.lookAt(center);
  }

  resize(w: number, h: number): void {
    this.renderer.setSize(w, h, false);
    this.camera.aspect = w / Math.max(h, 1);
    this.camera.updateProjectionMatrix();
  }

  start(): void {
    if (this.running) return;
    this.running = true;
    const tick = () => {
      if (!this.running) return;
      for (const mesh of this.meshes.values()) mesh.rotation.z += 0.004;
      this.renderer.render(this.scene, this.camera);
      this.frame = requestAnimationFrame(tick);
    };
    this.frame = requestAnimationFrame(tick);
  }

  stop(): void {
    this.running = false;
    cancelAnimationFrame(this.frame);
  }

  dispose(): void {
    this.stop();
    for (const label of [...this.meshes.keys()]) this.removeStructure(label);
    this.renderer.dispose();
  }
}
