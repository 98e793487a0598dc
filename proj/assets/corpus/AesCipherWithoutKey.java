package mini;

import javax.crypto.Cipher;
import javax.crypto.SecretKey;

public class AesCipherWithoutKey {

    /** Encrypts data with AES. */
    public byte[] encryptBytes(SecretKey key, byte[] data) throws Exception {
        Cipher cipher = Cipher.getInstance("AES/CBC/PKCS5Padding");
        cipher.init(Cipher.ENCRYPT_MODE, key);
        return cipher.doFinal(data);
    }
}
